#pragma once

#include "idasnet/nn/tensor.hpp"

namespace idasnet::nn {

/// Squared L2 error summed within each sample, averaged over the batch.
template <typename T>
double mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  require_same_shape(pred, target, "mse_loss");
  if (pred.batch() == 0) throw ShapeError("mse_loss: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    total += d * d;
  }
  return total / static_cast<double>(pred.batch());
}

template <typename T>
Tensor<T> mse_loss_grad(const Tensor<T>& pred, const Tensor<T>& target) {
  require_same_shape(pred, target, "mse_loss_grad");
  Tensor<T> g(pred.shape());
  const T k = static_cast<T>(2.0 / static_cast<double>(pred.batch()));
  for (std::size_t i = 0; i < pred.size(); ++i) g[i] = k * (pred[i] - target[i]);
  return g;
}

}  // namespace idasnet::nn
