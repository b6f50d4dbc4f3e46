#include "idasnet/channel/channel.hpp"

#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "idasnet/errors.hpp"
#include "idasnet/random.hpp"

namespace idasnet::channel {

double ComplexMatrix::frobenius_sq() const {
  double s = 0.0;
  for (const auto& v : data) s += std::norm(v);
  return s;
}

void ChannelGenConfig::validate() const {
  if (n_s == 0 || n_r == 0 || n_c == 0) throw ConfigError("channel dims must be positive");
  if (n_c > n_s) throw ConfigError("n_c must not exceed n_s");
  if (clusters < 1) throw ConfigError("clusters must be >= 1");
  if (paths_per_cluster < 1) throw ConfigError("paths_per_cluster must be >= 1");
  if (!(delay_spread >= 0.0) || !std::isfinite(delay_spread)) {
    throw ConfigError("delay_spread must be finite and non-negative");
  }
  if (!(angle_spread >= 0.0) || !std::isfinite(angle_spread)) {
    throw ConfigError("angle_spread must be finite and non-negative");
  }
}

SpatialChannel channel_from_paths(std::size_t n_s, std::size_t n_r, std::span<const Path> paths) {
  SpatialChannel h(n_s, n_r);
  std::vector<Complex> ramp(n_s);
  std::vector<Complex> steer(n_r);
  for (const Path& p : paths) {
    for (std::size_t n = 0; n < n_s; ++n) {
      // Reduce the phase argument first so large n*tau keeps full precision.
      const double cycles = std::fmod(static_cast<double>(n) * p.delay, static_cast<double>(n_s));
      ramp[n] = std::polar(1.0, 2.0 * std::numbers::pi * cycles / static_cast<double>(n_s));
    }
    const double s = std::sin(p.angle);
    for (std::size_t m = 0; m < n_r; ++m) {
      steer[m] = p.gain * std::polar(1.0, -std::numbers::pi * static_cast<double>(m) * s);
    }
    for (std::size_t n = 0; n < n_s; ++n) {
      Complex* row = &h.data[n * n_r];
      const Complex r = ramp[n];
      for (std::size_t m = 0; m < n_r; ++m) row[m] += r * steer[m];
    }
  }
  return h;
}

std::vector<Path> draw_paths(const ChannelGenConfig& cfg, std::uint64_t index) {
  cfg.validate();
  Rng rng = stream(cfg.seed, index);
  // Cluster centers sit in the first half of the retained delay window; excess
  // path delays are one-sided so sidelobe leakage past row n_c stays small.
  const double delay_lo = 2.0;
  const double delay_hi = std::max(delay_lo, static_cast<double>(cfg.n_c) / 2.0);
  const double decay = std::max(1.0, static_cast<double>(cfg.n_c) / 4.0);

  std::vector<Path> paths;
  paths.reserve(cfg.clusters * cfg.paths_per_cluster);
  double total = 0.0;
  for (std::size_t c = 0; c < cfg.clusters; ++c) {
    const double tau_c = uniform(rng, delay_lo, delay_hi);
    const double theta_c = uniform(rng, -std::numbers::pi / 3.0, std::numbers::pi / 3.0);
    const double power = std::exp(-tau_c / decay) * uniform(rng, 0.3, 1.0);
    for (std::size_t k = 0; k < cfg.paths_per_cluster; ++k) {
      Path p;
      p.delay = tau_c + cfg.delay_spread * std::abs(standard_normal(rng));
      p.angle = theta_c + cfg.angle_spread * standard_normal(rng);
      p.gain = complex_normal(rng, power / static_cast<double>(cfg.paths_per_cluster));
      total += std::norm(p.gain);
      paths.push_back(p);
    }
  }
  // Unit total path power per sample.
  const double scale = total > 0.0 ? 1.0 / std::sqrt(total) : 1.0;
  for (auto& p : paths) p.gain *= scale;
  return paths;
}

SpatialChannel generate_channel(const ChannelGenConfig& cfg, std::uint64_t index) {
  const auto paths = draw_paths(cfg, index);
  return channel_from_paths(cfg.n_s, cfg.n_r, paths);
}

std::vector<SpatialChannel> generate_dataset(const ChannelGenConfig& cfg, std::size_t count,
                                             std::uint64_t start_index) {
  cfg.validate();
  if (count < 1) throw ConfigError("dataset count must be >= 1");
  std::vector<SpatialChannel> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_channel(cfg, start_index + i));
  return out;
}

namespace {

// FFTW planning is not thread-safe; plans are created once per (rows, cols,
// sign) under a lock and executed with the new-array interface.
fftw_plan plan_for(std::size_t rows, std::size_t cols, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(rows, cols, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  std::vector<Complex> scratch(rows * cols);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw std::runtime_error("fftw plan creation failed");
  plans.emplace(key, p);
  return p;
}

ComplexMatrix dft2(const ComplexMatrix& in, int sign) {
  ComplexMatrix out(in.rows, in.cols);
  if (in.data.empty()) return out;
  fftw_plan p = plan_for(in.rows, in.cols, sign);
  // fftw_execute_dft does not write its input for out-of-place complex DFTs.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data.data()));
  fftw_execute_dft(p, src, reinterpret_cast<fftw_complex*>(out.data.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.rows * in.cols));
  for (auto& v : out.data) v *= scale;
  return out;
}

}  // namespace

ComplexMatrix angular_delay_transform(const ComplexMatrix& h) { return dft2(h, FFTW_FORWARD); }

ComplexMatrix inverse_angular_delay_transform(const ComplexMatrix& ha) {
  return dft2(ha, FFTW_BACKWARD);
}

AngularDelayChannel truncate_delay(const ComplexMatrix& ha, std::size_t n_c) {
  if (n_c > ha.rows) {
    throw DomainError("truncate_delay: n_c=" + std::to_string(n_c) + " exceeds " +
                      std::to_string(ha.rows) + " rows");
  }
  AngularDelayChannel out(n_c, ha.cols);
  std::copy(ha.data.begin(), ha.data.begin() + static_cast<std::ptrdiff_t>(n_c * ha.cols),
            out.data.begin());
  return out;
}

ComplexMatrix pad_delay(const AngularDelayChannel& hc, std::size_t n_s) {
  if (n_s < hc.rows) throw DomainError("pad_delay: n_s smaller than input rows");
  ComplexMatrix out(n_s, hc.cols);
  std::copy(hc.data.begin(), hc.data.end(), out.data.begin());
  return out;
}

}  // namespace idasnet::channel
