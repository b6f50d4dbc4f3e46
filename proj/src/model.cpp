#include "idasnet/pipeline/model.hpp"

#include <json.hpp>

namespace idasnet::pipeline {

using nlohmann::json;

void ModelConfig::validate() const {
  if (n_c < 1 || n_r < 1) throw ConfigError("model: n_c and n_r must be >= 1");
  if (idas.in_channels != 2) throw ConfigError("model: CSI images have 2 planes");
  idas.validate(n_c * n_r);
  if (m >= raster()) {
    throw ConfigError("model: M = " + std::to_string(m) + " must be below 2*N_c*N_r = " +
                      std::to_string(raster()));
  }
  if (k1 == 0) throw ConfigError("model: k1 must be positive");
}

std::string ModelConfig::to_json() const {
  const auto& s = idas.selfinfo;
  const json j{{"n_c", n_c},
               {"n_r", n_r},
               {"m", m},
               {"key", codec::to_string(key)},
               {"k1", k1},
               {"k2", k2},
               {"feature_maps", idas.feature_maps},
               {"mask_source", idas::to_string(idas.mask_source)},
               {"radius", s.radius},
               {"bandwidth", s.bandwidth},
               {"neighbors", s.neighbor_samples},
               {"texture", s.n_texture},
               {"sample_seed", s.sample_seed}};
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  ModelConfig c;
  try {
    const json j = json::parse(text);
    c.n_c = j.at("n_c").get<std::size_t>();
    c.n_r = j.at("n_r").get<std::size_t>();
    c.m = j.at("m").get<std::size_t>();
    c.key = codec::parse_rank_key(j.at("key").get<std::string>());
    c.k1 = j.at("k1").get<unsigned>();
    c.k2 = j.at("k2").get<unsigned>();
    c.idas.feature_maps = j.at("feature_maps").get<std::size_t>();
    c.idas.mask_source = idas::parse_mask_source(j.at("mask_source").get<std::string>());
    auto& s = c.idas.selfinfo;
    s.radius = j.at("radius").get<int>();
    s.bandwidth = j.at("bandwidth").get<double>();
    s.neighbor_samples = j.at("neighbors").get<std::size_t>();
    s.n_texture = j.at("texture").get<std::size_t>();
    s.sample_seed = j.at("sample_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace idasnet::pipeline
