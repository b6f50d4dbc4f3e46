#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "idasnet/errors.hpp"
#include "idasnet/nn/tensor.hpp"

namespace idasnet::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
  std::uint64_t step_count = 0;
};

/// One Adam update with bias correction over every trainable parameter.
/// Throws NumericError before touching any state if a gradient is not finite.
template <typename T>
void adam_step(const std::vector<Param<T>*>& params, AdamState<T>& state, double lr) {
  if (state.first_moment.empty()) {
    for (const auto* p : params) {
      state.first_moment.emplace_back(p->size(), T{});
      state.second_moment.emplace_back(p->size(), T{});
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: parameter list does not match optimizer state");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (state.first_moment[k].size() != params[k]->size()) {
      throw ShapeError("adam_step: state shape mismatch for " + params[k]->name);
    }
    if (!params[k]->trainable) continue;
    for (const T g : params[k]->grad) {
      if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient in " + params[k]->name);
    }
  }

  state.step_count += 1;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  const T b1 = static_cast<T>(c.beta1), b2 = static_cast<T>(c.beta2);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param<T>& p = *params[k];
    if (!p.trainable) continue;
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const T g = p.grad[i];
      m[i] = b1 * m[i] + (T{1} - b1) * g;
      v[i] = b2 * v[i] + (T{1} - b2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p.value[i] -= static_cast<T>(lr * m_hat / (std::sqrt(v_hat) + c.epsilon));
    }
  }
}

}  // namespace idasnet::nn
