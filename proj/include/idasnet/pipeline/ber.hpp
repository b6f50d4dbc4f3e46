#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "idasnet/channel/csi_image.hpp"

namespace idasnet::pipeline {

/// One SNR point of a QPSK/MRT bit error rate simulation.
struct BerPoint {
  double snr_db = 0.0;
  double ber = 0.0;
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t symbols = 0;
  double oracle = 0.0;     // expected BER from the Gaussian tail probability
  double std_error = 0.0;  // Monte-Carlo standard error of `ber` about `oracle`
  std::uint64_t skipped = 0;  // symbols on subcarriers with a zero-norm estimate
};

struct BerCurve {
  std::vector<BerPoint> points;
};

/// Gaussian tail probability Q(x).
double q_function(double x);

/// Spatial-frequency channel (N_s x N_r) of a normalized image: denormalize,
/// zero-pad the delay rows to n_s, inverse angular-delay transform.
channel::SpatialChannel spatial_channel(const channel::CsiImage& image,
                                        const channel::NormStats& stats, std::size_t n_s);

/// Per subcarrier n the precoder is v_n = est_n / ||est_n||; a Gray QPSK
/// symbol x with unit energy goes through y = h_n^H v_n x + w with
/// w ~ CN(0, s2), s2 = mean_n ||h_n||^2 / SNR for that realization; detection
/// is coherent on the true scalar h_n^H v_n. Symbols visit (realization,
/// subcarrier) pairs round-robin. Each SNR point draws from its own stream.
BerCurve ber_simulation(std::span<const channel::SpatialChannel> truth,
                        std::span<const channel::SpatialChannel> estimate,
                        std::span<const double> snr_db, std::uint64_t symbols_per_point,
                        std::uint64_t seed);

}  // namespace idasnet::pipeline
