#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "idasnet/errors.hpp"

namespace idasnet::selfinfo {

/// Neighbor displacement in (row, column) pixels.
struct Offset {
  int dy = 0;
  int dx = 0;
  bool operator==(const Offset&) const = default;
};

struct SelfInfoConfig {
  int radius = 3;                  // Manhattan radius R
  std::size_t patch_size = 1;      // n; the network path uses single pixels
  double bandwidth = 1.0;          // Gaussian kernel h, on the [0,1] pixel scale
  std::size_t neighbor_samples = 9;
  std::size_t n_texture = 224;     // texture patches zeroed per map
  std::uint64_t sample_seed = 0x1DA5;

  std::size_t full_neighborhood() const {
    const auto side = static_cast<std::size_t>(2 * radius + 1);
    return side * side;
  }
  /// Throws ConfigError; `pixels` is the per-map pixel count (0 skips that check).
  void validate(std::size_t pixels = 0) const;
};

/// Neighbor offsets used for every pixel. With neighbor_samples equal to the
/// full (2R+1)^2 window, the whole window (self included) in row-major order;
/// otherwise neighbor_samples distinct offsets drawn once from the
/// (2R+1)^2 - 1 non-self candidates using sample_seed.
std::vector<Offset> neighbor_offsets(const SelfInfoConfig& cfg);

/// Gaussian kernel value for squared distance `dist_sq`.
double gaussian_kernel(double dist_sq, double bandwidth);

/// Monte-Carlo probability estimate: mean Gaussian kernel between `patch` and
/// each neighbor patch (all of equal length).
double estimate_patch_prob(std::span<const double> patch,
                           const std::vector<std::vector<double>>& neighbors, double bandwidth);

/// Per-pixel (or per-patch) self-information in bits, additive constant
/// dropped.
struct SelfInfoMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

/// Pixel-patch self-information of a stack of `channels` planes (each
/// rows x cols); one patch spans all planes at a pixel. Neighbors outside the
/// image read as zero. Evaluated in log-sum-exp form, so the result stays
/// finite when every kernel underflows.
template <typename T>
void pixel_self_info(std::span<const T> planes, std::size_t channels, std::size_t rows,
                     std::size_t cols, std::span<const Offset> offsets, double bandwidth,
                     std::span<T> out, std::vector<T>& scratch);

extern template void pixel_self_info<float>(std::span<const float>, std::size_t, std::size_t,
                                            std::size_t, std::span<const Offset>, double,
                                            std::span<float>, std::vector<float>&);
extern template void pixel_self_info<double>(std::span<const double>, std::size_t, std::size_t,
                                             std::size_t, std::span<const Offset>, double,
                                             std::span<double>, std::vector<double>&);

/// Self-information of one plane for the configured patch size. Patches sit
/// on the (rows-n+1) x (cols-n+1) grid; neighbor patches are shifted by the
/// offsets with out-of-image pixels read as zero.
SelfInfoMap self_info_map(std::span<const double> plane, std::size_t rows, std::size_t cols,
                          const SelfInfoConfig& cfg, std::span<const Offset> offsets);

/// Convenience overload drawing offsets from cfg.
SelfInfoMap self_info_map(std::span<const double> plane, std::size_t rows, std::size_t cols,
                          const SelfInfoConfig& cfg);

/// The n_texture-th smallest entry under the (value, index) order; exactly
/// n_texture entries compare at or below it.
struct Threshold {
  double value = 0.0;
  std::size_t index = 0;
};

inline bool at_or_below(double value, std::size_t index, const Threshold& t) {
  return value < t.value || (value == t.value && index <= t.index);
}

template <typename T>
Threshold texture_threshold(std::span<const T> map, std::size_t n_texture) {
  if (n_texture == 0 || n_texture >= map.size()) {
    throw DomainError("texture_threshold: n_texture must lie in (0, " +
                      std::to_string(map.size()) + ")");
  }
  // nth_element on the values, then resolve ties at the cut by index.
  std::vector<T> sorted(map.begin(), map.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_texture - 1),
                   sorted.end());
  const T value = sorted[n_texture - 1];
  std::size_t below = 0;
  for (const T v : map) below += (v < value);
  std::size_t need = n_texture - below;  // entries equal to value still to take
  std::size_t idx = 0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] == value && --need == 0) {
      idx = i;
      break;
    }
  }
  return {static_cast<double>(value), idx};
}

/// mask[i] = 0 where (map[i], i) is at or below the threshold, else 1.
template <typename T>
void apply_threshold(std::span<const T> map, const Threshold& t, std::span<std::uint8_t> mask) {
  if (mask.size() != map.size()) throw ShapeError("apply_threshold: size mismatch");
  for (std::size_t i = 0; i < map.size(); ++i) {
    mask[i] = at_or_below(static_cast<double>(map[i]), i, t) ? 0 : 1;
  }
}

/// Binary masks M_i, one per self-information map.
struct MaskSet {
  std::size_t maps = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  std::span<const std::uint8_t> mask(std::size_t i) const {
    return std::span<const std::uint8_t>(bits).subspan(i * rows * cols, rows * cols);
  }
  std::size_t zero_count(std::size_t i) const;
};

MaskSet build_masks(std::span<const SelfInfoMap> maps, std::span<const Threshold> thresholds);

}  // namespace idasnet::selfinfo
