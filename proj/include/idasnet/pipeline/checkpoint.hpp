#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "idasnet/channel/csi_image.hpp"
#include "idasnet/pipeline/model.hpp"

namespace idasnet::pipeline {

inline constexpr char kCheckpointMagic[8] = {'I', 'D', 'A', 'S', 'C', 'K', 'P', '1'};
inline constexpr int kCheckpointVersion = 1;

/// Model plus the normalization it was trained with.
struct Checkpoint {
  std::unique_ptr<IdasNet<float>> model;
  channel::NormStats stats;
  std::string meta_json = "{}";  // free-form (seeds, training summary)
};

/// Layout: magic "IDASCKP1", u64 LE manifest length, JSON manifest {version,
/// config, norm, params[{name, dims, offset}], meta, config_hash}, then every
/// parameter and BN buffer as little-endian float32 in manifest order.
void save_checkpoint(const std::filesystem::path& path, IdasNet<float>& model,
                     const channel::NormStats& stats, const std::string& meta_json = "{}");
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// FNV-1a 64-bit, used for artifact hashes in manifests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

}  // namespace idasnet::pipeline
