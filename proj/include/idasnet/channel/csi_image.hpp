#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idasnet/channel/channel.hpp"

namespace idasnet::channel {

/// Dataset-global extrema of the real and imaginary entries of the training
/// channels; the affine map to [0,1] uses these.
struct NormStats {
  double min = 0.0;
  double max = 1.0;

  void validate() const;
  double normalize(double v) const;
  double denormalize(double u) const;
  /// Normalized value that represents a zero channel entry.
  double zero_point() const { return normalize(0.0); }
};

/// 2 x N_c x N_r real image: real plane then imaginary plane, row-major,
/// every value in [0,1].
struct CsiImage {
  std::size_t n_c = 0;
  std::size_t n_r = 0;
  std::vector<float> values;

  CsiImage() = default;
  CsiImage(std::size_t rows, std::size_t cols) : n_c(rows), n_r(cols), values(2 * rows * cols) {}

  std::size_t size() const { return values.size(); }
  /// Mean over all 2*N_c*N_r entries (the prefill value rho).
  double mean() const;
};

NormStats compute_stats(std::span<const AngularDelayChannel> channels);

/// Affine map to [0,1]; values outside [min, max] are clamped.
CsiImage normalize(const AngularDelayChannel& hc, const NormStats& stats);
AngularDelayChannel denormalize(const CsiImage& image, const NormStats& stats);

/// Images plus the metadata carried by the CSID v1 file header.
struct Dataset {
  NormStats stats;
  std::size_t n_c = 0;
  std::size_t n_r = 0;
  std::uint64_t seed = 0;
  int generator_version = kGeneratorVersion;
  std::uint64_t start_index = 0;
  std::optional<ChannelGenConfig> generator;
  std::vector<CsiImage> images;

  std::size_t size() const { return images.size(); }
};

/// Generates, transforms, truncates and normalizes `count` channels. Without
/// `stats` the extrema of the generated set are used.
Dataset build_dataset(const ChannelGenConfig& cfg, std::size_t count, std::uint64_t start_index,
                      std::optional<NormStats> stats = std::nullopt);

/// Truncated angular-delay channel of sample `index`.
AngularDelayChannel angular_delay_sample(const ChannelGenConfig& cfg, std::uint64_t index);

inline constexpr char kCsidMagic[8] = {'C', 'S', 'I', 'D', 'A', 'T', 'A', '1'};

/// CSID v1: magic "CSIDATA1", u64 LE header length, UTF-8 JSON header, then
/// count x 2*N_c*N_r little-endian float32 values.
void write_csid(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_csid(const std::filesystem::path& path);
std::string csid_header_json(const Dataset& dataset);

}  // namespace idasnet::channel
