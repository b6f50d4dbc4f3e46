#include "idasnet/pipeline/evaluate.hpp"

#include <cmath>

namespace idasnet::pipeline {

std::string to_string(NmseDomain d) {
  return d == NmseDomain::denormalized ? "denormalized" : "normalized";
}

NmseDomain parse_nmse_domain(const std::string& s) {
  if (s == "normalized" || s == "norm") return NmseDomain::normalized;
  if (s == "denormalized" || s == "denorm") return NmseDomain::denormalized;
  throw ConfigError("unknown NMSE domain '" + s + "' (normalized|denormalized)");
}

double nmse_to_db(double linear) {
  if (!(linear >= 0.0)) throw DomainError("NMSE must be non-negative");
  if (linear == 0.0) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(linear));
}

double sample_nmse(std::span<const double> truth, std::span<const double> estimate) {
  if (truth.size() != estimate.size()) throw ShapeError("nmse: size mismatch");
  double err = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - estimate[i];
    err += d * d;
    energy += truth[i] * truth[i];
  }
  if (energy == 0.0) throw DomainError("nmse: target has zero energy");
  return err / energy;
}

double nmse_linear(std::span<const double> truth, std::span<const double> estimate,
                   std::size_t sample_size) {
  if (truth.size() != estimate.size()) throw ShapeError("nmse: size mismatch");
  if (sample_size == 0 || truth.size() % sample_size != 0) {
    throw ShapeError("nmse: length is not a multiple of the sample size");
  }
  const std::size_t count = truth.size() / sample_size;
  if (count == 0) throw DomainError("nmse: empty dataset");
  double sum = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    sum += sample_nmse(truth.subspan(n * sample_size, sample_size),
                       estimate.subspan(n * sample_size, sample_size));
  }
  return sum / static_cast<double>(count);
}

std::vector<double> image_values(const channel::CsiImage& img, NmseDomain domain,
                                 const channel::NormStats& stats) {
  std::vector<double> out(img.values.begin(), img.values.end());
  if (domain == NmseDomain::denormalized) {
    for (auto& v : out) v = stats.denormalize(v);
  }
  return out;
}

codec::Codeword quantize_codeword(const codec::Codeword& c, const quant::LloydMaxQuantizer& q) {
  codec::Codeword out = c;
  for (auto& v : out.values) v = quant::quantize(q, v).value;
  return out;
}

}  // namespace idasnet::pipeline
