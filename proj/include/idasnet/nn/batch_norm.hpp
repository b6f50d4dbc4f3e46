#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "idasnet/nn/tensor.hpp"

namespace idasnet::nn {

enum class Mode { train, eval };

/// Values kept from a train-mode forward pass for the backward pass.
template <typename T>
struct BatchNormCache {
  Tensor<T> normalized;        // x_hat
  std::vector<T> inv_std;      // 1/sqrt(var + eps) per channel
  Mode mode = Mode::eval;
};

/// Per-channel batch normalization over (batch, height, width).
template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(std::size_t channels, const std::string& name, double epsilon = 1e-5,
              double momentum = 0.1)
      : channels_(channels),
        epsilon_(epsilon),
        momentum_(momentum),
        scale_(name + ".scale", {channels}),
        shift_(name + ".shift", {channels}),
        running_mean_(name + ".running_mean", {channels}, false),
        running_var_(name + ".running_var", {channels}, false) {
    std::fill(scale_.value.begin(), scale_.value.end(), T{1});
    std::fill(running_var_.value.begin(), running_var_.value.end(), T{1});
  }

  std::size_t channels() const { return channels_; }
  double epsilon() const { return epsilon_; }
  double momentum() const { return momentum_; }

  Param<T>& scale() { return scale_; }
  const Param<T>& scale() const { return scale_; }
  Param<T>& shift() { return shift_; }
  const Param<T>& shift() const { return shift_; }
  Param<T>& running_mean() { return running_mean_; }
  const Param<T>& running_mean() const { return running_mean_; }
  Param<T>& running_var() { return running_var_; }
  const Param<T>& running_var() const { return running_var_; }

  /// Train mode normalizes with batch statistics and updates the running
  /// statistics; eval mode uses the running statistics.
  Tensor<T> forward(const Tensor<T>& x, Mode mode, BatchNormCache<T>& cache) {
    if (x.channels() != channels_) {
      throw ShapeError("batch_norm: input has " + std::to_string(x.channels()) +
                       " channels, state has " + std::to_string(channels_));
    }
    const Shape s = x.shape();
    const std::size_t per_channel = s.batch * s.plane();
    if (mode == Mode::train && per_channel <= 1) {
      throw ShapeError("batch_norm: train mode needs more than one value per channel");
    }
    Tensor<T> y(s);
    cache.mode = mode;
    cache.normalized = Tensor<T>(s);
    cache.inv_std.assign(channels_, T{});
    for (std::size_t c = 0; c < channels_; ++c) {
      double mean = 0.0, var = 0.0;
      if (mode == Mode::train) {
        for (std::size_t n = 0; n < s.batch; ++n) {
          for (const T v : x.plane(n, c)) mean += v;
        }
        mean /= static_cast<double>(per_channel);
        for (std::size_t n = 0; n < s.batch; ++n) {
          for (const T v : x.plane(n, c)) var += (v - mean) * (v - mean);
        }
        var /= static_cast<double>(per_channel);
        const double unbiased = var * per_channel / static_cast<double>(per_channel - 1);
        running_mean_.value[c] =
            static_cast<T>((1.0 - momentum_) * running_mean_.value[c] + momentum_ * mean);
        running_var_.value[c] =
            static_cast<T>((1.0 - momentum_) * running_var_.value[c] + momentum_ * unbiased);
      } else {
        mean = running_mean_.value[c];
        var = running_var_.value[c];
      }
      const T inv = static_cast<T>(1.0 / std::sqrt(var + epsilon_));
      const T m = static_cast<T>(mean);
      const T g = scale_.value[c], b = shift_.value[c];
      cache.inv_std[c] = inv;
      for (std::size_t n = 0; n < s.batch; ++n) {
        const auto in = x.plane(n, c);
        auto xh = cache.normalized.plane(n, c);
        auto out = y.plane(n, c);
        for (std::size_t i = 0; i < in.size(); ++i) {
          xh[i] = (in[i] - m) * inv;
          out[i] = g * xh[i] + b;
        }
      }
    }
    return y;
  }

  /// Eval-mode forward that leaves the state untouched.
  Tensor<T> infer(const Tensor<T>& x) const {
    if (x.channels() != channels_) throw ShapeError("batch_norm: channel count mismatch");
    Tensor<T> y(x.shape());
    for (std::size_t c = 0; c < channels_; ++c) {
      const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(running_var_.value[c]) + epsilon_));
      const T m = running_mean_.value[c];
      const T g = scale_.value[c], b = shift_.value[c];
      for (std::size_t n = 0; n < x.batch(); ++n) {
        const auto in = x.plane(n, c);
        auto out = y.plane(n, c);
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = g * ((in[i] - m) * inv) + b;
      }
    }
    return y;
  }

  /// Accumulates scale/shift grads and returns dL/dx.
  Tensor<T> backward(const Tensor<T>& grad_out, const BatchNormCache<T>& cache) {
    const Shape s = grad_out.shape();
    require_same_shape(grad_out, cache.normalized, "batch_norm backward");
    Tensor<T> grad_in(s);
    const double count = static_cast<double>(s.batch * s.plane());
    for (std::size_t c = 0; c < channels_; ++c) {
      double sum_g = 0.0, sum_gx = 0.0;
      for (std::size_t n = 0; n < s.batch; ++n) {
        const auto g = grad_out.plane(n, c);
        const auto xh = cache.normalized.plane(n, c);
        for (std::size_t i = 0; i < g.size(); ++i) {
          sum_g += g[i];
          sum_gx += g[i] * xh[i];
        }
      }
      scale_.grad[c] += static_cast<T>(sum_gx);
      shift_.grad[c] += static_cast<T>(sum_g);
      const T k = scale_.value[c] * cache.inv_std[c];
      if (cache.mode == Mode::eval) {
        for (std::size_t n = 0; n < s.batch; ++n) {
          const auto g = grad_out.plane(n, c);
          auto gi = grad_in.plane(n, c);
          for (std::size_t i = 0; i < g.size(); ++i) gi[i] = k * g[i];
        }
        continue;
      }
      const T mean_g = static_cast<T>(sum_g / count);
      const T mean_gx = static_cast<T>(sum_gx / count);
      for (std::size_t n = 0; n < s.batch; ++n) {
        const auto g = grad_out.plane(n, c);
        const auto xh = cache.normalized.plane(n, c);
        auto gi = grad_in.plane(n, c);
        for (std::size_t i = 0; i < g.size(); ++i) gi[i] = k * (g[i] - mean_g - xh[i] * mean_gx);
      }
    }
    return grad_in;
  }

 private:
  std::size_t channels_ = 0;
  double epsilon_ = 1e-5;
  double momentum_ = 0.1;
  Param<T> scale_;
  Param<T> shift_;
  Param<T> running_mean_;
  Param<T> running_var_;
};

template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, BatchNorm2d<T>& state, Mode mode) {
  BatchNormCache<T> cache;
  return state.forward(x, mode, cache);
}

}  // namespace idasnet::nn
