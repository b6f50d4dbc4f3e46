#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace idasnet::channel {

using Complex = std::complex<double>;

/// Row-major dense complex matrix.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> data;

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double frobenius_sq() const;
};

/// Subcarriers x antennas channel (N_s x N_r) in the spatial-frequency domain.
using SpatialChannel = ComplexMatrix;
/// First N_c delay rows of the angular-delay channel (N_c x N_r).
using AngularDelayChannel = ComplexMatrix;

inline constexpr int kGeneratorVersion = 1;

/// Clustered multipath generator settings. Delays are in delay bins
/// (multiples of 1/(N_s * subcarrier spacing)); angles in radians from
/// broadside of a half-wavelength uniform linear array.
struct ChannelGenConfig {
  std::size_t n_s = 1024;
  std::size_t n_r = 32;
  std::size_t n_c = 32;
  std::size_t clusters = 4;
  std::size_t paths_per_cluster = 8;
  double delay_spread = 1.0;
  double angle_spread = 0.05;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Path {
  Complex gain;
  double delay = 0.0;
  double angle = 0.0;
};

/// H[n][m] = sum_l g_l * exp(+j 2 pi n tau_l / N_s) * exp(-j pi m sin(theta_l)).
/// The delay ramp sign is chosen so the forward DFT over subcarriers puts a
/// path with delay tau at delay bin tau.
SpatialChannel channel_from_paths(std::size_t n_s, std::size_t n_r, std::span<const Path> paths);

/// Draws the path set of sample `index`; depends only on (cfg, index).
std::vector<Path> draw_paths(const ChannelGenConfig& cfg, std::uint64_t index);

SpatialChannel generate_channel(const ChannelGenConfig& cfg, std::uint64_t index);

/// Samples start_index .. start_index+count-1.
std::vector<SpatialChannel> generate_dataset(const ChannelGenConfig& cfg, std::size_t count,
                                             std::uint64_t start_index = 0);

/// Unitary 2-D DFT: H_a = F_c H F_d with 1/sqrt(N) scaling per dimension.
ComplexMatrix angular_delay_transform(const ComplexMatrix& h);
ComplexMatrix inverse_angular_delay_transform(const ComplexMatrix& ha);

/// First n_c rows of ha.
AngularDelayChannel truncate_delay(const ComplexMatrix& ha, std::size_t n_c);
/// Zero rows appended so the result has n_s rows; inverse of truncate_delay on
/// channels whose energy is confined to the first rows.
ComplexMatrix pad_delay(const AngularDelayChannel& hc, std::size_t n_s);

}  // namespace idasnet::channel
