#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idasnet/channel/csi_image.hpp"
#include "idasnet/pipeline/model.hpp"
#include "idasnet/pipeline/train.hpp"
#include "idasnet/quant/lloyd_max.hpp"

namespace idasnet::pipeline {

enum class NmseDomain { normalized, denormalized };

std::string to_string(NmseDomain d);
NmseDomain parse_nmse_domain(const std::string& s);

/// Reported in place of -inf when the reconstruction is exact.
inline constexpr double kNmseFloorDb = -300.0;

double nmse_to_db(double linear);

/// ||truth - estimate||^2 / ||truth||^2 for one sample. DomainError when the
/// target has zero energy.
double sample_nmse(std::span<const double> truth, std::span<const double> estimate);

/// Sample mean of sample_nmse over consecutive blocks of `sample_size`.
double nmse_linear(std::span<const double> truth, std::span<const double> estimate,
                   std::size_t sample_size);

/// Image values in the requested domain (denormalized through `stats`).
std::vector<double> image_values(const channel::CsiImage& img, NmseDomain domain,
                                 const channel::NormStats& stats);

/// Codeword with every value replaced by its quantized level; indices and rho
/// are passed through.
codec::Codeword quantize_codeword(const codec::Codeword& c, const quant::LloydMaxQuantizer& q);

struct EvalOptions {
  NmseDomain domain = NmseDomain::normalized;
  const quant::LloydMaxQuantizer* quantizer = nullptr;
  std::size_t batch = 100;
};

struct EvalResult {
  std::size_t count = 0;
  double nmse = 0.0;
  double nmse_db = 0.0;
  std::optional<double> nmse_q;
  std::optional<double> nmse_q_db;
  double prefill_nmse_db = 0.0;  // NMSE(Z_f, H_c)
};

/// Runs `body(first, codewords)` over eval-mode encoder batches.
template <typename T, typename Body>
void for_each_encoded(const IdasNet<T>& model, const std::vector<channel::CsiImage>& images,
                      std::size_t batch, Body&& body) {
  if (batch < 1) throw ConfigError("batch size must be >= 1");
  std::vector<std::size_t> all(images.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t b = 0; b < all.size(); b += batch) {
    const std::size_t count = std::min(batch, all.size() - b);
    const auto idx = std::span<const std::size_t>(all).subspan(b, count);
    body(b, model.encode(make_batch<T>(images, idx)));
  }
}

/// Every codeword value the encoder produces on `images` (quantizer fitting).
template <typename T>
std::vector<double> codeword_values(const IdasNet<T>& model,
                                    const std::vector<channel::CsiImage>& images,
                                    std::size_t batch = 100) {
  std::vector<double> out;
  for_each_encoded(model, images, batch, [&](std::size_t, const std::vector<codec::Codeword>& cws) {
    for (const auto& c : cws) out.insert(out.end(), c.values.begin(), c.values.end());
  });
  return out;
}

/// Eval-mode reconstructions, optionally through the quantizer.
template <typename T>
std::vector<channel::CsiImage> reconstruct(const IdasNet<T>& model,
                                           const std::vector<channel::CsiImage>& images,
                                           const quant::LloydMaxQuantizer* quantizer = nullptr,
                                           std::size_t batch = 100) {
  std::vector<channel::CsiImage> out;
  out.reserve(images.size());
  for_each_encoded(model, images, batch, [&](std::size_t, std::vector<codec::Codeword> cws) {
    if (quantizer != nullptr) {
      for (auto& c : cws) c = quantize_codeword(c, *quantizer);
    }
    const Tensor<T> y = model.decode(cws);
    for (std::size_t n = 0; n < y.batch(); ++n) {
      channel::CsiImage img(model.config().n_c, model.config().n_r);
      const auto s = y.sample(n);
      for (std::size_t i = 0; i < s.size(); ++i) img.values[i] = static_cast<float>(s[i]);
      out.push_back(std::move(img));
    }
  });
  return out;
}

/// NMSE of the reconstruction (and of the quantized reconstruction when a
/// quantizer is given) plus NMSE(Z_f, H_c), all as sample means.
template <typename T>
EvalResult evaluate(const IdasNet<T>& model, const std::vector<channel::CsiImage>& images,
                    const channel::NormStats& stats, const EvalOptions& opt = {}) {
  if (images.empty()) throw DomainError("evaluate: empty dataset");
  double sum = 0.0, sum_q = 0.0, sum_prefill = 0.0;
  const auto accumulate = [&](const channel::CsiImage& truth, std::span<const T> est, double& acc) {
    const auto t = image_values(truth, opt.domain, stats);
    channel::CsiImage tmp(truth.n_c, truth.n_r);
    for (std::size_t i = 0; i < est.size(); ++i) tmp.values[i] = static_cast<float>(est[i]);
    acc += sample_nmse(t, image_values(tmp, opt.domain, stats));
  };
  for_each_encoded(model, images, opt.batch,
                   [&](std::size_t first, std::vector<codec::Codeword> cws) {
                     const Tensor<T> zf = model.prefill(cws);
                     const Tensor<T> y = model.decode(cws);
                     for (std::size_t n = 0; n < y.batch(); ++n) {
                       accumulate(images[first + n], y.sample(n), sum);
                       accumulate(images[first + n], zf.sample(n), sum_prefill);
                     }
                     if (opt.quantizer != nullptr) {
                       for (auto& c : cws) c = quantize_codeword(c, *opt.quantizer);
                       const Tensor<T> yq = model.decode(cws);
                       for (std::size_t n = 0; n < yq.batch(); ++n) {
                         accumulate(images[first + n], yq.sample(n), sum_q);
                       }
                     }
                   });
  const double count = static_cast<double>(images.size());
  EvalResult r;
  r.count = images.size();
  r.nmse = sum / count;
  r.nmse_db = nmse_to_db(r.nmse);
  r.prefill_nmse_db = nmse_to_db(sum_prefill / count);
  if (opt.quantizer != nullptr) {
    r.nmse_q = sum_q / count;
    r.nmse_q_db = nmse_to_db(*r.nmse_q);
  }
  return r;
}

}  // namespace idasnet::pipeline
