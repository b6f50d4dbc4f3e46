#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idasnet/nn/conv_block.hpp"
#include "idasnet/nn/parallel.hpp"
#include "idasnet/selfinfo/self_info.hpp"

namespace idasnet::idas {

using nn::Mode;
using nn::Tensor;

/// Where the self-information maps that drive the masks come from.
///   per_channel: one map per Conv1 feature map, thresholded separately.
///   broadcast:   one map from the 2-plane input (a patch is the [re, im]
///                pair), copied to every feature channel.
enum class MaskSource { per_channel, broadcast };

std::string to_string(MaskSource s);
MaskSource parse_mask_source(const std::string& s);  // ConfigError on unknown

struct IdasConfig {
  std::size_t in_channels = 2;
  std::size_t feature_maps = 64;
  selfinfo::SelfInfoConfig selfinfo;
  MaskSource mask_source = MaskSource::per_channel;

  void validate(std::size_t pixels = 0) const;
};

/// Masks for a whole batch, layout [sample][feature map][row][col].
struct BatchMasks {
  std::size_t batch = 0;
  std::size_t maps = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  std::span<const std::uint8_t> plane(std::size_t n, std::size_t c) const {
    const std::size_t hw = rows * cols;
    return std::span<const std::uint8_t>(bits).subspan((n * maps + c) * hw, hw);
  }
  selfinfo::MaskSet sample(std::size_t n) const;
};

/// Builds masks from per-sample self-information sources. `source` holds
/// `channels` planes per sample; with maps_out > channels == 1 the single map
/// is broadcast (pixel patches span all source planes in that case).
template <typename T>
BatchMasks compute_masks(const Tensor<T>& source, bool broadcast, std::size_t maps_out,
                         const selfinfo::SelfInfoConfig& cfg,
                         std::span<const selfinfo::Offset> offsets) {
  const auto s = source.shape();
  const std::size_t hw = s.plane();
  cfg.validate(hw);
  BatchMasks out{s.batch, maps_out, s.height, s.width, {}};
  out.bits.assign(s.batch * maps_out * hw, 1);
  nn::parallel_for(s.batch, [&](std::size_t n) {
    std::vector<T> scratch;
    std::vector<T> map(hw);
    const auto sample = source.sample(n);
    const auto fill = [&](std::size_t first, std::size_t count) {
      const auto t = selfinfo::texture_threshold<T>(map, cfg.n_texture);
      auto dst = std::span<std::uint8_t>(out.bits).subspan((n * maps_out + first) * hw, hw);
      selfinfo::apply_threshold<T>(map, t, dst);
      for (std::size_t k = 1; k < count; ++k) {
        std::copy(dst.begin(), dst.end(), out.bits.begin() + (n * maps_out + first + k) * hw);
      }
    };
    if (broadcast) {
      selfinfo::pixel_self_info<T>(sample, s.channels, s.height, s.width, offsets, cfg.bandwidth,
                                   map, scratch);
      fill(0, maps_out);
    } else {
      for (std::size_t c = 0; c < s.channels; ++c) {
        selfinfo::pixel_self_info<T>(sample.subspan(c * hw, hw), 1, s.height, s.width, offsets,
                                     cfg.bandwidth, map, scratch);
        fill(c, 1);
      }
    }
  });
  return out;
}

/// Conv1 (2 -> 64) -> mask -> Conv2 (64 -> 2), each conv followed by BN and
/// LReLU. The mask path has no trainable weights and no gradient.
template <typename T>
class IdasModule {
 public:
  struct Cache {
    typename nn::ConvBlock<T>::Cache conv1;
    BatchMasks masks;
    typename nn::ConvBlock<T>::Cache conv2;
  };

  IdasModule() : IdasModule(IdasConfig{}) {}
  explicit IdasModule(const IdasConfig& cfg)
      : cfg_(cfg),
        conv1_(cfg.in_channels, cfg.feature_maps, nn::Activation::lrelu, "idas.conv1"),
        conv2_(cfg.feature_maps, cfg.in_channels, nn::Activation::lrelu, "idas.conv2"),
        offsets_(selfinfo::neighbor_offsets(cfg.selfinfo)) {
    cfg_.validate();
  }

  const IdasConfig& config() const { return cfg_; }
  const std::vector<selfinfo::Offset>& offsets() const { return offsets_; }
  nn::ConvBlock<T>& conv1() { return conv1_; }
  const nn::ConvBlock<T>& conv1() const { return conv1_; }
  nn::ConvBlock<T>& conv2() { return conv2_; }
  const nn::ConvBlock<T>& conv2() const { return conv2_; }

  void init(Rng& rng) {
    conv1_.init(rng);
    conv2_.init(rng);
  }

  /// Masks from the input (broadcast) or from the given Conv1 features.
  BatchMasks masks_for(const Tensor<T>& x, const Tensor<T>& features) const {
    if (cfg_.mask_source == MaskSource::broadcast) {
      return compute_masks(x, true, cfg_.feature_maps, cfg_.selfinfo, offsets_);
    }
    return compute_masks(features, false, cfg_.feature_maps, cfg_.selfinfo, offsets_);
  }

  /// MaskNet alone, eval-mode Conv1 for the per-channel source.
  BatchMasks masknet_forward(const Tensor<T>& x) const {
    if (cfg_.mask_source == MaskSource::broadcast) return masks_for(x, x);
    return masks_for(x, conv1_.infer(x));
  }

  /// H_e for a batch. `frozen` replaces the freshly computed masks.
  Tensor<T> forward(const Tensor<T>& x, Mode mode, Cache& cache,
                    const BatchMasks* frozen = nullptr) {
    check_input(x);
    const Tensor<T>& f = conv1_.forward(x, mode, cache.conv1);
    if (frozen != nullptr) {
      if (frozen->batch != f.batch() || frozen->maps != f.channels() ||
          frozen->rows != f.height() || frozen->cols != f.width()) {
        throw ShapeError("idas: frozen masks do not match feature dims");
      }
      cache.masks = *frozen;
    } else {
      cache.masks = masks_for(x, f);
    }
    Tensor<T> masked = f;
    apply(masked, cache.masks);
    return conv2_.forward(masked, mode, cache.conv2);
  }

  /// Accumulates Conv1/Conv2 grads. Returns dL/dx when input_grad is set.
  Tensor<T> backward(const Tensor<T>& grad_he, const Cache& cache, bool input_grad = false) {
    Tensor<T> g = conv2_.backward(grad_he, cache.conv2);
    apply(g, cache.masks);
    return conv1_.backward(g, cache.conv1, input_grad);
  }

  void collect(std::vector<nn::Param<T>*>& trainable, std::vector<nn::Param<T>*>& buffers) {
    conv1_.collect(trainable, buffers);
    conv2_.collect(trainable, buffers);
  }

  /// Scalar weights of the fixed mask path counted as dense filter banks:
  /// the neighbor gather as K one-hot filters over the (2R+1)^2 window, and
  /// the K -> feature_maps averaging map.
  std::size_t fixed_parameter_count() const {
    const std::size_t k = offsets_.size();
    return k * cfg_.selfinfo.full_neighborhood() + cfg_.feature_maps * k;
  }

 private:
  void check_input(const Tensor<T>& x) const {
    if (x.channels() != cfg_.in_channels) {
      throw ShapeError("idas: input has " + std::to_string(x.channels()) + " channels, expected " +
                       std::to_string(cfg_.in_channels));
    }
  }

  static void apply(Tensor<T>& t, const BatchMasks& m) {
    for (std::size_t n = 0; n < t.batch(); ++n) {
      for (std::size_t c = 0; c < t.channels(); ++c) {
        auto p = t.plane(n, c);
        const auto mk = m.plane(n, c);
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (mk[i] == 0) p[i] = T{0};
        }
      }
    }
  }

  IdasConfig cfg_;
  nn::ConvBlock<T> conv1_;
  nn::ConvBlock<T> conv2_;
  std::vector<selfinfo::Offset> offsets_;
};

}  // namespace idasnet::idas
