#include "manifest.hpp"

#include "idasnet/pipeline/checkpoint.hpp"
#include "idasnet/pipeline/report.hpp"

namespace idasnet::cli {

using nlohmann::json;

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_.push_back({{"path", path.string()}, {"fnv1a64", pipeline::hex64(pipeline::fnv1a64_file(path))}});
}

void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

void RunManifest::write_all() const {
  json outputs = json::array();
  for (const auto& p : outputs_) {
    outputs.push_back({{"path", p.string()}, {"fnv1a64", pipeline::hex64(pipeline::fnv1a64_file(p))}});
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  const json m{{"command", command_},      {"resolved_args", args_}, {"config", config_},
               {"seeds", seeds_},          {"inputs", inputs_},      {"outputs", outputs},
               {"duration_s", seconds}};
  const std::string text = m.dump(2) + "\n";
  for (const auto& p : outputs_) pipeline::write_text_atomic(p.string() + ".manifest.json", text);
}

void require_writable(const std::filesystem::path& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw IoError(path.string() + " exists; pass --force to overwrite");
  }
}

void require_readable(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("cannot read " + path.string());
}

}  // namespace idasnet::cli
