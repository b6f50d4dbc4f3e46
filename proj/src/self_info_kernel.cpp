// Hot loop of the mask path. Built with vectorized math (see CMakeLists).

#include <algorithm>
#include <cmath>
#include <numbers>

#include "idasnet/selfinfo/self_info.hpp"

namespace idasnet::selfinfo {

template <typename T>
void pixel_self_info(std::span<const T> planes, std::size_t channels, std::size_t rows,
                     std::size_t cols, std::span<const Offset> offsets, double bandwidth,
                     std::span<T> out, std::vector<T>& scratch) {
  const std::size_t hw = rows * cols;
  const std::size_t k = offsets.size();
  if (planes.size() != channels * hw || out.size() != hw) {
    throw ShapeError("pixel_self_info: buffer sizes do not match dims");
  }
  if (k == 0) throw ConfigError("pixel_self_info: no neighbor offsets");
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");

  // Zero-padded copy of the planes so the gather below has no border tests.
  int reach = 0;
  for (const auto& o : offsets) reach = std::max({reach, std::abs(o.dy), std::abs(o.dx)});
  const std::size_t pad = static_cast<std::size_t>(reach);
  const std::size_t pw = cols + 2 * pad, ph = rows + 2 * pad;
  scratch.assign(k * hw + channels * ph * pw, T{});
  T* padded = scratch.data() + k * hw;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < rows; ++y) {
      std::copy_n(planes.data() + c * hw + y * cols, cols,
                  padded + c * ph * pw + (y + pad) * pw + pad);
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(offsets[j].dy) *
                                     static_cast<std::ptrdiff_t>(pw) + offsets[j].dx;
    T* dist = scratch.data() + j * hw;
    for (std::size_t c = 0; c < channels; ++c) {
      const T* base = padded + c * ph * pw;
      for (std::size_t y = 0; y < rows; ++y) {
        const T* p = base + (y + pad) * pw + pad;
        const T* q = p + shift;
        T* d = dist + y * cols;
        for (std::size_t x = 0; x < cols; ++x) {
          const T diff = p[x] - q[x];
          d[x] += diff * diff;
        }
      }
    }
  }

  const T inv_two_h2 = static_cast<T>(1.0 / (2.0 * bandwidth * bandwidth));
  // log q = log(1/(k sqrt(2 pi) h)) - m/(2h^2) + log sum exp(-(d - m)/(2h^2))
  const T log_norm = static_cast<T>(
      -std::log(static_cast<double>(k) * std::sqrt(2.0 * std::numbers::pi) * bandwidth));
  const T inv_ln2 = static_cast<T>(1.0 / std::numbers::ln2);
  // Pixel-inner loops so the min, exp and log vectorize.
  std::vector<T> lo(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(hw));
  for (std::size_t j = 1; j < k; ++j) {
    const T* d = scratch.data() + j * hw;
    for (std::size_t i = 0; i < hw; ++i) lo[i] = std::min(lo[i], d[i]);
  }
  std::fill(out.begin(), out.end(), T{0});
  for (std::size_t j = 0; j < k; ++j) {
    const T* d = scratch.data() + j * hw;
    for (std::size_t i = 0; i < hw; ++i) out[i] += std::exp((lo[i] - d[i]) * inv_two_h2);
  }
  for (std::size_t i = 0; i < hw; ++i) {
    const T log_q = log_norm - lo[i] * inv_two_h2 + std::log(out[i]);
    out[i] = -log_q * inv_ln2;
  }
}

template void pixel_self_info<float>(std::span<const float>, std::size_t, std::size_t,
                                     std::size_t, std::span<const Offset>, double,
                                     std::span<float>, std::vector<float>&);
template void pixel_self_info<double>(std::span<const double>, std::size_t, std::size_t,
                                      std::size_t, std::span<const Offset>, double,
                                      std::span<double>, std::vector<double>&);

}  // namespace idasnet::selfinfo
