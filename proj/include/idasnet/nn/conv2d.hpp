#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "idasnet/nn/parallel.hpp"
#include "idasnet/nn/tensor.hpp"
#include "idasnet/random.hpp"

namespace idasnet::nn {

/// 3x3 convolution, stride 1, zero padding 1 (spatial size preserved).
///
/// Computes the cross-correlation
///   out[o][y][x] = bias[o] + sum_{c,ky,kx} w[o][c][ky][kx] * in[c][y+ky-1][x+kx-1]
/// with out-of-range input pixels read as zero.
template <typename T>
class Conv2d {
 public:
  static constexpr std::size_t kKernel = 3;

  Conv2d() = default;
  Conv2d(std::size_t in_channels, std::size_t out_channels, const std::string& name,
         bool trainable = true)
      : in_(in_channels),
        out_(out_channels),
        weight_(name + ".weight", {out_channels, in_channels, kKernel, kKernel}, trainable),
        bias_(name + ".bias", {out_channels}, trainable) {}

  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }

  Param<T>& weight() { return weight_; }
  const Param<T>& weight() const { return weight_; }
  Param<T>& bias() { return bias_; }
  const Param<T>& bias() const { return bias_; }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and bias.
  void init_fan_in_uniform(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_ * kKernel * kKernel));
    for (auto& w : weight_.value) w = static_cast<T>(uniform(rng, -bound, bound));
    for (auto& b : bias_.value) b = static_cast<T>(uniform(rng, -bound, bound));
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    check_input(x);
    const Shape s = x.shape();
    Tensor<T> y({s.batch, out_, s.height, s.width});
    parallel_for(s.batch, [&](std::size_t n) { forward_sample(x, y, n); });
    return y;
  }

  /// Returns dL/dx and accumulates dL/dw, dL/db into the parameter grads.
  /// Per-sample partial gradients are reduced in sample order, so the result
  /// is independent of the worker count. With input_grad = false the returned
  /// tensor is left zero (first layer of a network).
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& grad_out, bool input_grad = true) {
    check_input(x);
    const Shape s = x.shape();
    if (grad_out.shape() != Shape{s.batch, out_, s.height, s.width}) {
      throw ShapeError("conv2d backward: grad shape " + grad_out.shape().str());
    }
    Tensor<T> grad_in(s);
    const std::size_t wsize = weight_.size();
    std::vector<T> partial_w(s.batch * wsize, T{});
    std::vector<T> partial_b(s.batch * out_, T{});
    parallel_for(s.batch, [&](std::size_t n) {
      backward_sample(x, grad_out, grad_in, n, std::span<T>(partial_w).subspan(n * wsize, wsize),
                      std::span<T>(partial_b).subspan(n * out_, out_), input_grad);
    });
    for (std::size_t n = 0; n < s.batch; ++n) {
      for (std::size_t i = 0; i < wsize; ++i) weight_.grad[i] += partial_w[n * wsize + i];
      for (std::size_t o = 0; o < out_; ++o) bias_.grad[o] += partial_b[n * out_ + o];
    }
    return grad_in;
  }

 private:
  void check_input(const Tensor<T>& x) const {
    if (x.channels() != in_) {
      throw ShapeError("conv2d: input has " + std::to_string(x.channels()) +
                       " channels, layer expects " + std::to_string(in_));
    }
    if (x.height() < 1 || x.width() < 1) throw ShapeError("conv2d: empty spatial dims");
  }

  // Valid output range for a kernel tap offset d in {-1, 0, 1}.
  static std::size_t lo(std::ptrdiff_t d) { return d < 0 ? static_cast<std::size_t>(-d) : 0; }
  static std::size_t hi(std::ptrdiff_t d, std::size_t n) {
    return d > 0 ? n - static_cast<std::size_t>(d) : n;
  }

  void forward_sample(const Tensor<T>& x, Tensor<T>& y, std::size_t n) const {
    const std::size_t H = x.height(), W = x.width();
    for (std::size_t o = 0; o < out_; ++o) {
      auto out = y.plane(n, o);
      std::fill(out.begin(), out.end(), bias_.value[o]);
      for (std::size_t c = 0; c < in_; ++c) {
        const auto in = x.plane(n, c);
        const T* w = &weight_.value[(o * in_ + c) * 9];
        for (std::ptrdiff_t ky = -1; ky <= 1; ++ky) {
          if (H <= static_cast<std::size_t>(ky < 0 ? -ky : ky)) continue;
          for (std::ptrdiff_t kx = -1; kx <= 1; ++kx) {
            if (W <= static_cast<std::size_t>(kx < 0 ? -kx : kx)) continue;
            const T wv = w[(ky + 1) * 3 + (kx + 1)];
            const std::size_t x0 = lo(kx), x1 = hi(kx, W);
            for (std::size_t yy = lo(ky); yy < hi(ky, H); ++yy) {
              T* dst = out.data() + yy * W;
              const T* src = in.data() + (yy + ky) * W + kx;
              for (std::size_t xx = x0; xx < x1; ++xx) dst[xx] += wv * src[xx];
            }
          }
        }
      }
    }
  }

  void backward_sample(const Tensor<T>& x, const Tensor<T>& g, Tensor<T>& gin, std::size_t n,
                       std::span<T> gw, std::span<T> gb, bool input_grad) const {
    const std::size_t H = x.height(), W = x.width();
    std::vector<T> acc(W);
    for (std::size_t o = 0; o < out_; ++o) {
      const auto go = g.plane(n, o);
      T bsum{};
      for (const T v : go) bsum += v;
      gb[o] += bsum;
      for (std::size_t c = 0; c < in_; ++c) {
        const auto in = x.plane(n, c);
        auto gi = gin.plane(n, c);
        const T* w = &weight_.value[(o * in_ + c) * 9];
        T* gwk = &gw[(o * in_ + c) * 9];
        for (std::ptrdiff_t ky = -1; ky <= 1; ++ky) {
          if (H <= static_cast<std::size_t>(ky < 0 ? -ky : ky)) continue;
          for (std::ptrdiff_t kx = -1; kx <= 1; ++kx) {
            if (W <= static_cast<std::size_t>(kx < 0 ? -kx : kx)) continue;
            const T wv = w[(ky + 1) * 3 + (kx + 1)];
            const std::size_t x0 = lo(kx), x1 = hi(kx, W);
            std::fill(acc.begin(), acc.end(), T{});
            for (std::size_t yy = lo(ky); yy < hi(ky, H); ++yy) {
              const T* gr = go.data() + yy * W;
              const T* src = in.data() + (yy + ky) * W + kx;
              T* dst = gi.data() + (yy + ky) * W + kx;
              for (std::size_t xx = x0; xx < x1; ++xx) acc[xx] += gr[xx] * src[xx];
              if (input_grad) {
                for (std::size_t xx = x0; xx < x1; ++xx) dst[xx] += wv * gr[xx];
              }
            }
            T total{};
            for (std::size_t xx = x0; xx < x1; ++xx) total += acc[xx];
            gwk[(ky + 1) * 3 + (kx + 1)] += total;
          }
        }
      }
    }
  }

  std::size_t in_ = 0;
  std::size_t out_ = 0;
  Param<T> weight_;
  Param<T> bias_;
};

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Conv2d<T>& layer) {
  return layer.forward(x);
}

}  // namespace idasnet::nn
