#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idasnet/codec/codec.hpp"
#include "idasnet/idas/idas.hpp"
#include "idasnet/recon/reconstructor.hpp"

namespace idasnet::pipeline {

using nn::Mode;
using nn::Tensor;

struct ModelConfig {
  std::size_t n_c = 32;
  std::size_t n_r = 32;
  idas::IdasConfig idas;
  std::size_t m = 221;
  codec::RankKey key = codec::RankKey::magnitude;
  unsigned k1 = 64;
  unsigned k2 = 10;

  std::size_t raster() const { return 2 * n_c * n_r; }
  void validate() const;
  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

struct ParamCounts {
  std::size_t trainable = 0;
  std::size_t non_trainable = 0;  // fixed mask-path weights
  std::size_t buffers = 0;        // BN running statistics, reported apart
  std::size_t total() const { return trainable + non_trainable; }
};

/// Closed-form size of a fully connected encoder 2 N_c N_r -> M with bias.
inline std::size_t fc_encoder_parameters(std::size_t n_c, std::size_t n_r, std::size_t m) {
  return 2 * n_c * n_r * m + m;
}

/// H_e -> top-M codeword -> prefill -> reconstruction.
template <typename T>
class IdasNet {
 public:
  /// Optional replacements for the per-pass masks and gather indices.
  struct Frozen {
    const idas::BatchMasks* masks = nullptr;
    const std::vector<std::vector<std::uint32_t>>* indices = nullptr;
  };

  struct Cache {
    typename idas::IdasModule<T>::Cache idas;
    Tensor<T> he;
    std::vector<codec::Codeword> codewords;
    Tensor<T> prefilled;
    typename recon::Reconstructor<T>::Cache recon;
  };

  explicit IdasNet(const ModelConfig& cfg)
      : cfg_(cfg), idas_(cfg.idas), recon_(cfg.idas.in_channels) {
    cfg_.validate();
    encoder_.m = cfg_.m;
    encoder_.key = cfg_.key;
    encoder_.k1 = cfg_.k1;
    encoder_.k2 = cfg_.k2;
    encoder_.bandwidth = cfg_.idas.selfinfo.bandwidth;
    encoder_.offsets = idas_.offsets();
  }

  const ModelConfig& config() const { return cfg_; }
  idas::IdasModule<T>& idas() { return idas_; }
  const idas::IdasModule<T>& idas() const { return idas_; }
  recon::Reconstructor<T>& reconstructor() { return recon_; }
  const recon::Reconstructor<T>& reconstructor() const { return recon_; }
  const codec::EncoderConfig& encoder() const { return encoder_; }

  void init(std::uint64_t seed) {
    Rng rng = stream(seed, 0x1D45);
    idas_.init(rng);
    recon_.init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode, Cache& cache, Frozen frozen = {}) {
    check_input(x);
    cache.he = idas_.forward(x, mode, cache.idas, frozen.masks);
    if (frozen.indices != nullptr && frozen.indices->size() != x.batch()) {
      throw ShapeError("model: frozen indices need one list per sample");
    }
    cache.codewords = encode_he(x, cache.he, frozen.indices);
    cache.prefilled = prefill(cache.codewords);
    return recon_.forward(cache.prefilled, mode, cache.recon);
  }

  /// Accumulates gradients of every trainable parameter. Gradients reach H_e
  /// only at the selected positions; rho and the masks are constants.
  void backward(const Tensor<T>& grad_out, const Cache& cache) {
    const Tensor<T> g_zf = recon_.backward(grad_out, cache.recon);
    Tensor<T> g_he(cache.he.shape());
    for (std::size_t n = 0; n < g_he.batch(); ++n) {
      auto dst = g_he.sample(n);
      const auto src = g_zf.sample(n);
      for (const auto i : cache.codewords[n].indices) dst[i] = src[i];
    }
    idas_.backward(g_he, cache.idas, false);
  }

  /// Eval-mode encoder: one codeword per sample.
  std::vector<codec::Codeword> encode(const Tensor<T>& x) const {
    check_input(x);
    const Tensor<T> f = idas_.conv1().infer(x);
    const idas::BatchMasks masks = idas_.masks_for(x, f);
    Tensor<T> masked = f;
    for (std::size_t n = 0; n < masked.batch(); ++n) {
      for (std::size_t c = 0; c < masked.channels(); ++c) {
        auto p = masked.plane(n, c);
        const auto mk = masks.plane(n, c);
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (mk[i] == 0) p[i] = T{0};
        }
      }
    }
    const Tensor<T> he = idas_.conv2().infer(masked);
    return encode_he(x, he, nullptr);
  }

  /// Eval-mode decoder.
  Tensor<T> decode(const std::vector<codec::Codeword>& codewords) const {
    return recon_.infer(prefill(codewords));
  }

  Tensor<T> prefill(const std::vector<codec::Codeword>& codewords) const {
    Tensor<T> zf({codewords.size(), cfg_.idas.in_channels, cfg_.n_c, cfg_.n_r});
    for (std::size_t n = 0; n < codewords.size(); ++n) {
      const auto& c = codewords[n];
      if (c.n_c != cfg_.n_c || c.n_r != cfg_.n_r) throw ShapeError("codeword dims differ from model");
      codec::ifr_prefill<T>(c, zf.sample(n));
    }
    return zf;
  }

  std::vector<nn::Param<T>*> trainable() {
    std::vector<nn::Param<T>*> t, b;
    collect(t, b);
    return t;
  }
  std::vector<nn::Param<T>*> buffers() {
    std::vector<nn::Param<T>*> t, b;
    collect(t, b);
    return b;
  }
  /// Trainable parameters then buffers, the checkpoint order.
  std::vector<nn::Param<T>*> state() {
    std::vector<nn::Param<T>*> t, b;
    collect(t, b);
    t.insert(t.end(), b.begin(), b.end());
    return t;
  }

  void zero_grad() {
    for (auto* p : trainable()) p->zero_grad();
  }

  ParamCounts count_parameters() const {
    auto* self = const_cast<IdasNet*>(this);
    ParamCounts counts;
    for (const auto* p : self->trainable()) counts.trainable += p->size();
    for (const auto* p : self->buffers()) counts.buffers += p->size();
    counts.non_trainable = idas_.fixed_parameter_count();
    return counts;
  }

 private:
  void collect(std::vector<nn::Param<T>*>& t, std::vector<nn::Param<T>*>& b) {
    idas_.collect(t, b);
    recon_.collect(t, b);
  }

  void check_input(const Tensor<T>& x) const {
    if (x.channels() != cfg_.idas.in_channels || x.height() != cfg_.n_c || x.width() != cfg_.n_r) {
      throw ShapeError("model expects (N, " + std::to_string(cfg_.idas.in_channels) + ", " +
                       std::to_string(cfg_.n_c) + ", " + std::to_string(cfg_.n_r) + "), got " +
                       x.shape().str());
    }
  }

  std::vector<codec::Codeword> encode_he(const Tensor<T>& x, const Tensor<T>& he,
                                         const std::vector<std::vector<std::uint32_t>>* frozen) const {
    std::vector<codec::Codeword> out(x.batch());
    nn::parallel_for(x.batch(), [&](std::size_t n) {
      double rho = 0.0;
      for (const T v : x.sample(n)) rho += v;
      rho /= static_cast<double>(x.shape().sample());
      const auto h = he.sample(n);
      if (frozen == nullptr) {
        out[n] = codec::ifc_encode<T>(h, cfg_.n_c, cfg_.n_r, rho, encoder_);
        return;
      }
      codec::Codeword c;
      c.n_c = cfg_.n_c;
      c.n_r = cfg_.n_r;
      c.k1 = cfg_.k1;
      c.k2 = cfg_.k2;
      c.key = cfg_.key;
      c.rho = rho;
      c.indices = (*frozen)[n];
      for (const auto i : c.indices) {
        if (i >= h.size()) throw CodewordError("frozen index out of range");
        c.values.push_back(static_cast<double>(h[i]));
      }
      out[n] = std::move(c);
    });
    return out;
  }

  ModelConfig cfg_;
  idas::IdasModule<T> idas_;
  recon::Reconstructor<T> recon_;
  codec::EncoderConfig encoder_;
};

}  // namespace idasnet::pipeline
