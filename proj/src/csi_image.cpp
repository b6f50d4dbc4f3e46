#include "idasnet/channel/csi_image.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "binary_io.hpp"
#include "idasnet/errors.hpp"

namespace idasnet::channel {

using nlohmann::json;

void NormStats::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError("normalization stats not finite");
  if (!(max > min)) throw ConfigError("degenerate normalization stats (max <= min)");
}

double NormStats::normalize(double v) const { return std::clamp((v - min) / (max - min), 0.0, 1.0); }

double NormStats::denormalize(double u) const { return min + u * (max - min); }

double CsiImage::mean() const {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (const float v : values) s += v;
  return s / static_cast<double>(values.size());
}

NormStats compute_stats(std::span<const AngularDelayChannel> channels) {
  NormStats s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& hc : channels) {
    for (const auto& v : hc.data) {
      s.min = std::min({s.min, v.real(), v.imag()});
      s.max = std::max({s.max, v.real(), v.imag()});
    }
  }
  s.validate();
  return s;
}

CsiImage normalize(const AngularDelayChannel& hc, const NormStats& stats) {
  stats.validate();
  CsiImage img(hc.rows, hc.cols);
  const std::size_t plane = hc.rows * hc.cols;
  for (std::size_t i = 0; i < plane; ++i) {
    img.values[i] = static_cast<float>(stats.normalize(hc.data[i].real()));
    img.values[plane + i] = static_cast<float>(stats.normalize(hc.data[i].imag()));
  }
  return img;
}

AngularDelayChannel denormalize(const CsiImage& image, const NormStats& stats) {
  stats.validate();
  AngularDelayChannel hc(image.n_c, image.n_r);
  const std::size_t plane = image.n_c * image.n_r;
  if (image.values.size() != 2 * plane) throw ShapeError("denormalize: image size mismatch");
  for (std::size_t i = 0; i < plane; ++i) {
    hc.data[i] = {stats.denormalize(image.values[i]), stats.denormalize(image.values[plane + i])};
  }
  return hc;
}

AngularDelayChannel angular_delay_sample(const ChannelGenConfig& cfg, std::uint64_t index) {
  return truncate_delay(angular_delay_transform(generate_channel(cfg, index)), cfg.n_c);
}

Dataset build_dataset(const ChannelGenConfig& cfg, std::size_t count, std::uint64_t start_index,
                      std::optional<NormStats> stats) {
  cfg.validate();
  if (count < 1) throw ConfigError("dataset count must be >= 1");
  std::vector<AngularDelayChannel> truncated;
  truncated.reserve(count);
  for (std::size_t i = 0; i < count; ++i) truncated.push_back(angular_delay_sample(cfg, start_index + i));

  Dataset ds;
  ds.stats = stats ? *stats : compute_stats(truncated);
  ds.stats.validate();
  ds.n_c = cfg.n_c;
  ds.n_r = cfg.n_r;
  ds.seed = cfg.seed;
  ds.start_index = start_index;
  ds.generator = cfg;
  ds.images.reserve(count);
  for (const auto& hc : truncated) ds.images.push_back(normalize(hc, ds.stats));
  return ds;
}

namespace {

json generator_json(const ChannelGenConfig& g, std::uint64_t start_index) {
  return json{{"n_s", g.n_s},
              {"n_r", g.n_r},
              {"n_c", g.n_c},
              {"clusters", g.clusters},
              {"paths_per_cluster", g.paths_per_cluster},
              {"delay_spread", g.delay_spread},
              {"angle_spread", g.angle_spread},
              {"seed", g.seed},
              {"start_index", start_index}};
}

}  // namespace

std::string csid_header_json(const Dataset& ds) {
  json h{{"count", ds.images.size()}, {"n_c", ds.n_c},   {"n_r", ds.n_r},
         {"min", ds.stats.min},       {"max", ds.stats.max}, {"seed", ds.seed},
         {"generator_version", ds.generator_version}};
  if (ds.generator) h["generator"] = generator_json(*ds.generator, ds.start_index);
  return h.dump();
}

void write_csid(const std::filesystem::path& path, const Dataset& ds) {
  const std::size_t per_image = 2 * ds.n_c * ds.n_r;
  for (const auto& img : ds.images) {
    if (img.values.size() != per_image) throw ShapeError("write_csid: image size mismatch");
  }
  io::AtomicWriter writer(path);
  auto& out = writer.stream();
  io::write_magic(out, kCsidMagic);
  io::write_string_block(out, csid_header_json(ds));
  for (const auto& img : ds.images) {
    for (const float v : img.values) io::write_le<float>(out, v);
  }
  writer.commit();
}

Dataset read_csid(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  io::expect_magic(in, kCsidMagic, "CSID");
  json h;
  try {
    h = json::parse(io::read_string_block(in));
  } catch (const json::exception& e) {
    throw FormatError(std::string("CSID header: ") + e.what());
  }
  Dataset ds;
  try {
    ds.n_c = h.at("n_c").get<std::size_t>();
    ds.n_r = h.at("n_r").get<std::size_t>();
    ds.stats.min = h.at("min").get<double>();
    ds.stats.max = h.at("max").get<double>();
    ds.seed = h.at("seed").get<std::uint64_t>();
    ds.generator_version = h.at("generator_version").get<int>();
    const auto count = h.at("count").get<std::size_t>();
    if (h.contains("generator")) {
      const auto& g = h["generator"];
      ChannelGenConfig cfg;
      cfg.n_s = g.at("n_s").get<std::size_t>();
      cfg.n_r = g.at("n_r").get<std::size_t>();
      cfg.n_c = g.at("n_c").get<std::size_t>();
      cfg.clusters = g.at("clusters").get<std::size_t>();
      cfg.paths_per_cluster = g.at("paths_per_cluster").get<std::size_t>();
      cfg.delay_spread = g.at("delay_spread").get<double>();
      cfg.angle_spread = g.at("angle_spread").get<double>();
      cfg.seed = g.at("seed").get<std::uint64_t>();
      ds.start_index = g.at("start_index").get<std::uint64_t>();
      ds.generator = cfg;
    }
    const std::size_t per_image = 2 * ds.n_c * ds.n_r;
    ds.images.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      CsiImage img(ds.n_c, ds.n_r);
      for (std::size_t i = 0; i < per_image; ++i) img.values[i] = io::read_le<float>(in);
      ds.images.push_back(std::move(img));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("CSID header: ") + e.what());
  }
  ds.stats.validate();
  return ds;
}

}  // namespace idasnet::channel
