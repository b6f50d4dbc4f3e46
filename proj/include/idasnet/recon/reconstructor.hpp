#pragma once

#include <array>
#include <string>
#include <vector>

#include "idasnet/nn/conv_block.hpp"

namespace idasnet::recon {

using nn::Mode;
using nn::Tensor;

/// Output channels of the seven conv layers.
inline constexpr std::array<std::size_t, 7> kLayerChannels = {8, 16, 2, 8, 16, 2, 2};

/// Two 3-layer conv blocks, a shortcut adding the prefilled input to the
/// second block's output, then conv + BN + sigmoid.
template <typename T>
class Reconstructor {
 public:
  struct Cache {
    std::array<typename nn::ConvBlock<T>::Cache, 7> layers;
  };

  explicit Reconstructor(std::size_t channels = 2) : channels_(channels) {
    std::size_t in = channels;
    for (std::size_t i = 0; i < 7; ++i) {
      const std::size_t out = (i == 2 || i == 5 || i == 6) ? channels : kLayerChannels[i];
      const auto act = i == 6 ? nn::Activation::sigmoid : nn::Activation::lrelu;
      layers_[i] = nn::ConvBlock<T>(in, out, act, "ifr.layer" + std::to_string(i + 1));
      in = out;
    }
  }

  nn::ConvBlock<T>& layer(std::size_t i) { return layers_.at(i); }
  const nn::ConvBlock<T>& layer(std::size_t i) const { return layers_.at(i); }

  void init(Rng& rng) {
    for (auto& l : layers_) l.init(rng);
  }

  Tensor<T> forward(const Tensor<T>& zf, Mode mode, Cache& cache) {
    check_input(zf);
    Tensor<T> h = zf;
    for (std::size_t i = 0; i < 6; ++i) h = layers_[i].forward(h, mode, cache.layers[i]);
    add_inplace(h, zf);
    return layers_[6].forward(h, mode, cache.layers[6]);
  }

  Tensor<T> infer(const Tensor<T>& zf) const {
    check_input(zf);
    Tensor<T> h = zf;
    for (std::size_t i = 0; i < 6; ++i) h = layers_[i].infer(h);
    add_inplace(h, zf);
    return layers_[6].infer(h);
  }

  /// Accumulates layer grads and returns dL/dZ_f (both paths of the shortcut).
  Tensor<T> backward(const Tensor<T>& grad_out, const Cache& cache) {
    const Tensor<T> g_sum = layers_[6].backward(grad_out, cache.layers[6]);
    Tensor<T> g = g_sum;
    for (std::size_t i = 6; i-- > 0;) g = layers_[i].backward(g, cache.layers[i]);
    add_inplace(g, g_sum);
    return g;
  }

  void collect(std::vector<nn::Param<T>*>& trainable, std::vector<nn::Param<T>*>& buffers) {
    for (auto& l : layers_) l.collect(trainable, buffers);
  }

 private:
  void check_input(const Tensor<T>& zf) const {
    if (zf.channels() != channels_) {
      throw ShapeError("reconstructor: input has " + std::to_string(zf.channels()) +
                       " channels, expected " + std::to_string(channels_));
    }
  }

  static void add_inplace(Tensor<T>& a, const Tensor<T>& b) {
    nn::require_same_shape(a, b, "reconstructor shortcut");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }

  std::size_t channels_;
  std::array<nn::ConvBlock<T>, 7> layers_;
};

}  // namespace idasnet::recon
