#include "idasnet/pipeline/checkpoint.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

#include "binary_io.hpp"

namespace idasnet::pipeline {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void save_checkpoint(const std::filesystem::path& path, IdasNet<float>& model,
                     const channel::NormStats& stats, const std::string& meta_json) {
  const std::string cfg = model.config().to_json();
  json params = json::array();
  std::size_t offset = 0;
  const auto state = model.state();
  for (const auto* p : state) {
    params.push_back({{"name", p->name}, {"dims", p->dims}, {"offset", offset},
                      {"trainable", p->trainable}});
    offset += p->size();
  }
  json meta;
  try {
    meta = json::parse(meta_json);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint meta: ") + e.what());
  }
  const json manifest{{"format", "idasnet-checkpoint"},
                      {"version", kCheckpointVersion},
                      {"config", json::parse(cfg)},
                      {"config_hash", hex64(fnv1a64(cfg))},
                      {"norm", {{"min", stats.min}, {"max", stats.max}}},
                      {"params", params},
                      {"param_count", offset},
                      {"meta", meta}};
  io::AtomicWriter w(path);
  io::write_magic(w.stream(), kCheckpointMagic);
  io::write_string_block(w.stream(), manifest.dump());
  for (const auto* p : state) {
    for (const float v : p->value) io::write_le<float>(w.stream(), v);
  }
  w.commit();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  io::expect_magic(in, kCheckpointMagic, "checkpoint");
  json manifest;
  try {
    manifest = json::parse(io::read_string_block(in));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint manifest: ") + e.what());
  }
  Checkpoint ck;
  try {
    if (manifest.at("version").get<int>() != kCheckpointVersion) {
      throw FormatError("checkpoint: unsupported version");
    }
    const auto cfg = ModelConfig::from_json(manifest.at("config").dump());
    ck.model = std::make_unique<IdasNet<float>>(cfg);
    ck.stats.min = manifest.at("norm").at("min").get<double>();
    ck.stats.max = manifest.at("norm").at("max").get<double>();
    ck.meta_json = manifest.value("meta", json::object()).dump();
    const auto& listed = manifest.at("params");
    const auto state = ck.model->state();
    if (listed.size() != state.size()) throw FormatError("checkpoint: parameter list mismatch");
    for (std::size_t k = 0; k < state.size(); ++k) {
      if (listed[k].at("name").get<std::string>() != state[k]->name ||
          listed[k].at("dims").get<std::vector<std::size_t>>() != state[k]->dims) {
        throw FormatError("checkpoint: parameter '" + state[k]->name + "' does not match");
      }
    }
    for (auto* p : state) {
      for (auto& v : p->value) v = io::read_le<float>(in);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint manifest: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config: ") + e.what());
  }
  in.peek();
  if (!in.eof()) throw FormatError("checkpoint: trailing bytes");
  ck.stats.validate();
  return ck;
}

}  // namespace idasnet::pipeline
