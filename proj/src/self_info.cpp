#include "idasnet/selfinfo/self_info.hpp"

#include <string>

#include "idasnet/random.hpp"

namespace idasnet::selfinfo {

void SelfInfoConfig::validate(std::size_t pixels) const {
  if (radius < 0) throw ConfigError("radius must be non-negative");
  if (patch_size < 1) throw ConfigError("patch_size must be >= 1");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("bandwidth must be positive");
  if (neighbor_samples < 1 || neighbor_samples > full_neighborhood()) {
    throw ConfigError("neighbor_samples must lie in [1, " + std::to_string(full_neighborhood()) +
                      "]");
  }
  if (pixels != 0 && (n_texture == 0 || n_texture >= pixels)) {
    throw ConfigError("n_texture must lie in (0, " + std::to_string(pixels) + ")");
  }
}

std::vector<Offset> neighbor_offsets(const SelfInfoConfig& cfg) {
  cfg.validate();
  const int r = cfg.radius;
  std::vector<Offset> all;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) all.push_back({dy, dx});
  }
  if (cfg.neighbor_samples == all.size()) return all;

  std::vector<Offset> candidates;
  for (const auto& o : all) {
    if (o.dy != 0 || o.dx != 0) candidates.push_back(o);
  }
  // Partial Fisher-Yates: the first neighbor_samples entries are the draw.
  Rng rng(splitmix64(cfg.sample_seed));
  const std::size_t k = std::min(cfg.neighbor_samples, candidates.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(k);
  return candidates;
}

double gaussian_kernel(double dist_sq, double bandwidth) {
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  return std::exp(-dist_sq / (2.0 * bandwidth * bandwidth)) /
         (std::sqrt(2.0 * std::numbers::pi) * bandwidth);
}

double estimate_patch_prob(std::span<const double> patch,
                           const std::vector<std::vector<double>>& neighbors, double bandwidth) {
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  if (neighbors.empty()) throw DomainError("estimate_patch_prob: no neighbors");
  double sum = 0.0;
  for (const auto& nb : neighbors) {
    if (nb.size() != patch.size()) throw ShapeError("estimate_patch_prob: patch size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < patch.size(); ++i) d += (patch[i] - nb[i]) * (patch[i] - nb[i]);
    sum += gaussian_kernel(d, bandwidth);
  }
  return sum / static_cast<double>(neighbors.size());
}

SelfInfoMap self_info_map(std::span<const double> plane, std::size_t rows, std::size_t cols,
                          const SelfInfoConfig& cfg, std::span<const Offset> offsets) {
  cfg.validate();
  if (plane.size() != rows * cols) throw ShapeError("self_info_map: plane size mismatch");
  const std::size_t n = cfg.patch_size;
  if (n > rows || n > cols) throw ShapeError("self_info_map: patch larger than plane");

  SelfInfoMap out;
  if (n == 1) {
    out.rows = rows;
    out.cols = cols;
    out.values.resize(rows * cols);
    std::vector<double> scratch;
    pixel_self_info<double>(plane, 1, rows, cols, offsets, cfg.bandwidth, out.values, scratch);
    return out;
  }

  out.rows = rows - n + 1;
  out.cols = cols - n + 1;
  out.values.resize(out.rows * out.cols);
  const auto pixel = [&](long y, long x) -> double {
    if (y < 0 || x < 0 || y >= static_cast<long>(rows) || x >= static_cast<long>(cols)) return 0.0;
    return plane[static_cast<std::size_t>(y) * cols + static_cast<std::size_t>(x)];
  };
  const double inv_two_h2 = 1.0 / (2.0 * cfg.bandwidth * cfg.bandwidth);
  const double log_norm = -std::log(static_cast<double>(offsets.size()) *
                                    std::sqrt(2.0 * std::numbers::pi) * cfg.bandwidth);
  std::vector<double> dist(offsets.size());
  for (std::size_t a = 0; a < out.rows; ++a) {
    for (std::size_t b = 0; b < out.cols; ++b) {
      for (std::size_t j = 0; j < offsets.size(); ++j) {
        double d = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
          for (std::size_t v = 0; v < n; ++v) {
            const long y = static_cast<long>(a + u), x = static_cast<long>(b + v);
            const double diff = pixel(y, x) - pixel(y + offsets[j].dy, x + offsets[j].dx);
            d += diff * diff;
          }
        }
        dist[j] = d;
      }
      const double m = *std::min_element(dist.begin(), dist.end());
      double s = 0.0;
      for (const double d : dist) s += std::exp((m - d) * inv_two_h2);
      out.values[a * out.cols + b] = -(log_norm - m * inv_two_h2 + std::log(s)) / std::numbers::ln2;
    }
  }
  return out;
}

SelfInfoMap self_info_map(std::span<const double> plane, std::size_t rows, std::size_t cols,
                          const SelfInfoConfig& cfg) {
  const auto offsets = neighbor_offsets(cfg);
  return self_info_map(plane, rows, cols, cfg, offsets);
}

std::size_t MaskSet::zero_count(std::size_t i) const {
  std::size_t zeros = 0;
  for (const auto b : mask(i)) zeros += (b == 0);
  return zeros;
}

MaskSet build_masks(std::span<const SelfInfoMap> maps, std::span<const Threshold> thresholds) {
  if (maps.size() != thresholds.size()) throw ShapeError("build_masks: one threshold per map");
  MaskSet set;
  set.maps = maps.size();
  if (maps.empty()) return set;
  set.rows = maps[0].rows;
  set.cols = maps[0].cols;
  const std::size_t plane = set.rows * set.cols;
  set.bits.resize(set.maps * plane);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].rows != set.rows || maps[i].cols != set.cols) {
      throw ShapeError("build_masks: maps must share dims");
    }
    apply_threshold<double>(maps[i].values, thresholds[i],
                            std::span<std::uint8_t>(set.bits).subspan(i * plane, plane));
  }
  return set;
}

}  // namespace idasnet::selfinfo
