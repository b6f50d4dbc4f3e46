#include "idasnet/pipeline/ber.hpp"

#include <cmath>
#include <complex>
#include <iostream>

#include "idasnet/errors.hpp"
#include "idasnet/nn/parallel.hpp"
#include "idasnet/random.hpp"

namespace idasnet::pipeline {

using cplx = std::complex<double>;

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

channel::SpatialChannel spatial_channel(const channel::CsiImage& image,
                                        const channel::NormStats& stats, std::size_t n_s) {
  const auto hc = channel::denormalize(image, stats);
  return channel::inverse_angular_delay_transform(channel::pad_delay(hc, n_s));
}

namespace {

// Effective scalar channel h^H v per subcarrier and the noise variance.
struct Realization {
  std::vector<cplx> effective;
  std::vector<bool> usable;
  double noise_scale = 0.0;  // mean_n ||h_n||^2, divided by SNR per point
};

Realization prepare(const channel::SpatialChannel& h, const channel::SpatialChannel& est) {
  if (h.rows != est.rows || h.cols != est.cols) throw ShapeError("ber: channel dims differ");
  Realization r;
  r.effective.assign(h.rows, cplx{});
  r.usable.assign(h.rows, false);
  double energy = 0.0;
  for (std::size_t n = 0; n < h.rows; ++n) {
    double norm_est = 0.0;
    cplx dot{};
    for (std::size_t a = 0; a < h.cols; ++a) {
      const cplx hv = h.data[n * h.cols + a];
      const cplx ev = est.data[n * h.cols + a];
      energy += std::norm(hv);
      norm_est += std::norm(ev);
      dot += std::conj(hv) * ev;
    }
    if (norm_est > 0.0) {
      r.effective[n] = dot / std::sqrt(norm_est);
      r.usable[n] = true;
    }
  }
  r.noise_scale = energy / static_cast<double>(h.rows);
  return r;
}

}  // namespace

BerCurve ber_simulation(std::span<const channel::SpatialChannel> truth,
                        std::span<const channel::SpatialChannel> estimate,
                        std::span<const double> snr_db, std::uint64_t symbols_per_point,
                        std::uint64_t seed) {
  if (truth.size() != estimate.size()) throw ShapeError("ber: channel lists differ in length");
  if (truth.empty()) throw DomainError("ber: no channels");
  if (symbols_per_point == 0) throw DomainError("ber: symbols_per_point must be positive");
  for (std::size_t k = 1; k < snr_db.size(); ++k) {
    if (!(snr_db[k] > snr_db[k - 1])) throw ConfigError("ber: SNR points must be ascending");
  }

  std::vector<Realization> reals(truth.size());
  nn::parallel_for(truth.size(), [&](std::size_t i) { reals[i] = prepare(truth[i], estimate[i]); });
  const std::size_t n_s = truth[0].rows;
  for (const auto& h : truth) {
    if (h.rows != n_s) throw ShapeError("ber: realizations differ in subcarrier count");
  }
  std::size_t skipped_subcarriers = 0;
  for (const auto& r : reals) {
    for (const bool u : r.usable) skipped_subcarriers += !u;
  }
  if (skipped_subcarriers > 0) {
    std::cerr << "warning: " << skipped_subcarriers
              << " subcarrier(s) have a zero-norm estimate and are skipped\n";
  }

  BerCurve curve;
  curve.points.resize(snr_db.size());
  const std::uint64_t pairs = static_cast<std::uint64_t>(reals.size()) * n_s;
  nn::parallel_for(snr_db.size(), [&](std::size_t p) {
    Rng rng = stream(seed, p);
    const double snr = std::pow(10.0, snr_db[p] / 10.0);
    BerPoint pt;
    pt.snr_db = snr_db[p];
    double expected = 0.0, variance = 0.0;
    for (std::uint64_t s = 0; s < symbols_per_point; ++s) {
      const std::uint64_t pair = s % pairs;
      const auto& r = reals[pair / n_s];
      const std::size_t n = pair % n_s;
      const bool b0 = (rng() >> 63) != 0;
      const bool b1 = (rng() >> 63) != 0;
      const cplx w = complex_normal(rng, r.noise_scale / snr);
      if (!r.usable[n]) {
        ++pt.skipped;
        continue;
      }
      const cplx e = r.effective[n];
      const cplx x = cplx(b0 ? -1.0 : 1.0, b1 ? -1.0 : 1.0) / std::numbers::sqrt2;
      const cplx y = e * x + w;
      // Coherent detection: derotate by the known effective channel.
      const cplx z = y * std::conj(e);
      pt.errors += static_cast<std::uint64_t>((z.real() < 0.0) != b0);
      pt.errors += static_cast<std::uint64_t>((z.imag() < 0.0) != b1);
      pt.bits += 2;
      ++pt.symbols;
      const double sigma = std::sqrt(r.noise_scale / snr);
      const double pe = q_function(std::abs(e) / sigma);
      expected += 2.0 * pe;
      variance += 2.0 * pe * (1.0 - pe);
    }
    if (pt.bits > 0) {
      const double bits = static_cast<double>(pt.bits);
      pt.ber = static_cast<double>(pt.errors) / bits;
      pt.oracle = expected / bits;
      pt.std_error = std::sqrt(variance) / bits;
    }
    curve.points[p] = pt;
  });
  return curve;
}

}  // namespace idasnet::pipeline
