#pragma once

#include <cmath>

#include "idasnet/nn/tensor.hpp"

namespace idasnet::nn {

enum class Activation { lrelu, sigmoid };

inline constexpr double kLeakySlope = 0.3;

template <typename T>
T lrelu(T x) {
  return x >= T{0} ? x : static_cast<T>(kLeakySlope) * x;
}

template <typename T>
T lrelu_grad(T x) {
  return x >= T{0} ? T{1} : static_cast<T>(kLeakySlope);
}

template <typename T>
T sigmoid(T x) {
  // Split by sign so exp never overflows.
  if (x >= T{0}) return T{1} / (T{1} + std::exp(-x));
  const T e = std::exp(x);
  return e / (T{1} + e);
}

template <typename T>
Tensor<T> activation(const Tensor<T>& x, Activation kind) {
  Tensor<T> y(x.shape());
  if (kind == Activation::lrelu) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = lrelu(x[i]);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  }
  return y;
}

/// dL/dx given the pre-activation x, the activation output y, and dL/dy.
template <typename T>
Tensor<T> activation_backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& grad_out,
                              Activation kind) {
  require_same_shape(x, grad_out, "activation backward");
  Tensor<T> g(x.shape());
  if (kind == Activation::lrelu) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = grad_out[i] * lrelu_grad(x[i]);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = grad_out[i] * y[i] * (T{1} - y[i]);
  }
  return g;
}

}  // namespace idasnet::nn
