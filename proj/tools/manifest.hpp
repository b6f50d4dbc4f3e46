#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace idasnet::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Raised for refused overwrites and unreadable inputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Collects what a run read and wrote; written beside every output as
/// `<output>.manifest.json`.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_args(nlohmann::json args) { args_ = std::move(args); }
  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void add_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  /// Hashes outputs and writes one manifest per output.
  void write_all() const;

 private:
  std::string command_;
  nlohmann::json args_ = nlohmann::json::object();
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json seeds_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::filesystem::path> outputs_;
  std::chrono::steady_clock::time_point start_;
};

/// Throws IoError when `path` exists and overwriting was not requested.
void require_writable(const std::filesystem::path& path, bool force);

/// Throws IoError when `path` is missing.
void require_readable(const std::filesystem::path& path);

}  // namespace idasnet::cli
