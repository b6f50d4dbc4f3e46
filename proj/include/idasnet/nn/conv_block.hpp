#pragma once

#include <string>
#include <vector>

#include "idasnet/nn/activation.hpp"
#include "idasnet/nn/batch_norm.hpp"
#include "idasnet/nn/conv2d.hpp"

namespace idasnet::nn {

/// conv -> BN -> activation, the unit every trainable layer in the network uses.
template <typename T>
class ConvBlock {
 public:
  struct Cache {
    Tensor<T> input;
    BatchNormCache<T> bn;
    Tensor<T> pre_activation;
    Tensor<T> output;
  };

  ConvBlock() = default;
  ConvBlock(std::size_t in_ch, std::size_t out_ch, Activation act, const std::string& name)
      : conv_(in_ch, out_ch, name + ".conv"), bn_(out_ch, name + ".bn"), act_(act) {}

  Conv2d<T>& conv() { return conv_; }
  const Conv2d<T>& conv() const { return conv_; }
  BatchNorm2d<T>& bn() { return bn_; }
  const BatchNorm2d<T>& bn() const { return bn_; }
  Activation activation_kind() const { return act_; }

  const Tensor<T>& forward(const Tensor<T>& x, Mode mode, Cache& cache) {
    cache.input = x;
    const Tensor<T> z = conv_.forward(x);
    cache.pre_activation = bn_.forward(z, mode, cache.bn);
    cache.output = activation(cache.pre_activation, act_);
    return cache.output;
  }

  /// Eval-mode forward without caches or state updates.
  Tensor<T> infer(const Tensor<T>& x) const {
    return activation(bn_.infer(conv_.forward(x)), act_);
  }

  Tensor<T> backward(const Tensor<T>& grad_out, const Cache& cache, bool input_grad = true) {
    const Tensor<T> g_act = activation_backward(cache.pre_activation, cache.output, grad_out, act_);
    const Tensor<T> g_bn = bn_.backward(g_act, cache.bn);
    return conv_.backward(cache.input, g_bn, input_grad);
  }

  void init(Rng& rng) { conv_.init_fan_in_uniform(rng); }

  void collect(std::vector<Param<T>*>& trainable, std::vector<Param<T>*>& buffers) {
    trainable.push_back(&conv_.weight());
    trainable.push_back(&conv_.bias());
    trainable.push_back(&bn_.scale());
    trainable.push_back(&bn_.shift());
    buffers.push_back(&bn_.running_mean());
    buffers.push_back(&bn_.running_var());
  }

 private:
  Conv2d<T> conv_;
  BatchNorm2d<T> bn_;
  Activation act_ = Activation::lrelu;
};

}  // namespace idasnet::nn
