#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "idasnet/errors.hpp"

namespace idasnet::nn {

/// NCHW dimensions of a dense 4-D tensor.
struct Shape {
  std::size_t batch = 0;
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t plane() const { return height * width; }
  std::size_t sample() const { return channels * height * width; }
  std::size_t size() const { return batch * channels * height * width; }

  bool operator==(const Shape&) const = default;

  std::string str() const {
    return "(" + std::to_string(batch) + "," + std::to_string(channels) + "," +
           std::to_string(height) + "," + std::to_string(width) + ")";
  }
};

/// Dense row-major NCHW tensor with value semantics.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{}) : shape_(shape), data_(shape.size(), fill) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_.str());
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t batch() const { return shape_.batch; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
    return data_[((n * shape_.channels + c) * shape_.height + y) * shape_.width + x];
  }
  const T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[((n * shape_.channels + c) * shape_.height + y) * shape_.width + x];
  }

  std::span<T> sample(std::size_t n) {
    return std::span<T>(data_).subspan(n * shape_.sample(), shape_.sample());
  }
  std::span<const T> sample(std::size_t n) const {
    return std::span<const T>(data_).subspan(n * shape_.sample(), shape_.sample());
  }
  std::span<T> plane(std::size_t n, std::size_t c) {
    return std::span<T>(data_).subspan((n * shape_.channels + c) * shape_.plane(), shape_.plane());
  }
  std::span<const T> plane(std::size_t n, std::size_t c) const {
    return std::span<const T>(data_).subspan((n * shape_.channels + c) * shape_.plane(),
                                             shape_.plane());
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool all_finite() const {
    for (const T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

 private:
  Shape shape_{};
  std::vector<T> data_;
};

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape " + a.shape().str() + " vs " + b.shape().str());
  }
}

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  std::vector<To> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = static_cast<To>(t[i]);
  return Tensor<To>(t.shape(), std::move(out));
}

/// A named parameter block with its gradient accumulator.
template <typename T>
struct Param {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<T> value;
  std::vector<T> grad;
  bool trainable = true;

  Param() = default;
  Param(std::string n, std::vector<std::size_t> d, bool train = true)
      : name(std::move(n)), dims(std::move(d)), trainable(train) {
    std::size_t count = 1;
    for (auto v : dims) count *= v;
    value.assign(count, T{});
    grad.assign(count, T{});
  }

  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), T{}); }
};

}  // namespace idasnet::nn
