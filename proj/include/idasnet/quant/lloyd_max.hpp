#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace idasnet::quant {

/// Scalar quantizer with 2^bits ascending levels and the 2^bits - 1 cell
/// boundaries between them. Cell k is (boundary[k-1], boundary[k]].
struct LloydMaxQuantizer {
  unsigned bits = 0;
  std::vector<double> levels;
  std::vector<double> boundaries;
  std::vector<double> distortion_history;  // per-iteration MSE on the fit samples
  std::size_t fit_samples = 0;
  std::size_t iterations = 0;
  bool converged = false;

  std::size_t size() const { return levels.size(); }
  /// Throws ConfigError when the level/boundary layout is inconsistent.
  void validate() const;
};

struct Quantized {
  std::size_t index = 0;
  double value = 0.0;
};

/// Lloyd iterations on the empirical distribution, starting from the sample
/// quantiles (k + 1/2) / 2^bits. Stops once the relative distortion
/// improvement drops to tol, the partition stops changing, or max_iters.
LloydMaxQuantizer fit_lloyd_max(std::span<const double> samples, unsigned bits,
                                std::size_t max_iters = 300, double tol = 1e-9);

/// Out-of-range inputs clamp to the extreme cells.
Quantized quantize(const LloydMaxQuantizer& q, double x);
double dequantize(const LloydMaxQuantizer& q, std::size_t index);

/// Mean squared quantization error over `samples`.
double quantizer_mse(const LloydMaxQuantizer& q, std::span<const double> samples);

std::string quantizer_to_json(const LloydMaxQuantizer& q);
LloydMaxQuantizer quantizer_from_json(const std::string& text);
void write_quantizer(const std::filesystem::path& path, const LloydMaxQuantizer& q);
LloydMaxQuantizer read_quantizer(const std::filesystem::path& path);

}  // namespace idasnet::quant
