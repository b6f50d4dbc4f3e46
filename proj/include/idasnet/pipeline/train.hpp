#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "idasnet/channel/csi_image.hpp"
#include "idasnet/nn/adam.hpp"
#include "idasnet/nn/loss.hpp"
#include "idasnet/nn/lr_schedule.hpp"
#include "idasnet/pipeline/model.hpp"

namespace idasnet::pipeline {

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;  // sample-weighted mean of the batch losses
  double lr = 0.0;
  double seconds = 0.0;
};

struct TrainConfig {
  nn::LrSchedule schedule;  // schedule.total is the epoch count
  std::size_t batch = 100;
  std::uint64_t seed = 1;
  nn::AdamConfig adam;
  /// Called after every epoch; may be empty.
  std::function<void(const EpochStats&)> on_epoch;

  void validate(std::size_t train_size) const;
};

/// Stacks images [first, first + count) of `order` into an N x 2 x N_c x N_r tensor.
template <typename T>
Tensor<T> make_batch(const std::vector<channel::CsiImage>& images,
                     std::span<const std::size_t> order) {
  if (order.empty()) throw ShapeError("make_batch: empty batch");
  const auto& first = images.at(order[0]);
  Tensor<T> x({order.size(), 2, first.n_c, first.n_r});
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& img = images.at(order[k]);
    if (img.n_c != first.n_c || img.n_r != first.n_r) throw ShapeError("make_batch: mixed dims");
    auto dst = x.sample(k);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(img.values[i]);
  }
  return x;
}

/// Epoch permutation of [0, n); a pure function of (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

/// Minimizes the batch-mean squared reconstruction error with Adam under the
/// warmup + cosine schedule. Throws NumericError on a non-finite loss.
template <typename T>
std::vector<EpochStats> train(IdasNet<T>& model, const std::vector<channel::CsiImage>& images,
                              const TrainConfig& cfg) {
  cfg.validate(images.size());
  nn::AdamState<T> adam;
  adam.config = cfg.adam;
  const auto params = model.trainable();
  std::vector<EpochStats> history;
  typename IdasNet<T>::Cache cache;
  for (std::size_t epoch = 1; epoch <= cfg.schedule.total; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const double lr = cfg.schedule.at(epoch);
    const auto order = epoch_order(images.size(), cfg.seed, epoch);
    double weighted = 0.0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch) {
      const std::size_t count = std::min(cfg.batch, order.size() - b);
      const auto idx = std::span<const std::size_t>(order).subspan(b, count);
      const Tensor<T> x = make_batch<T>(images, idx);
      model.zero_grad();
      const Tensor<T> y = model.forward(x, Mode::train, cache);
      const double loss = static_cast<double>(nn::mse_loss(y, x));
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(b / cfg.batch + 1));
      }
      weighted += loss * static_cast<double>(count);
      model.backward(nn::mse_loss_grad(y, x), cache);
      nn::adam_step(params, adam, lr);
    }
    EpochStats s;
    s.epoch = epoch;
    s.loss = weighted / static_cast<double>(images.size());
    s.lr = lr;
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    history.push_back(s);
    if (cfg.on_epoch) cfg.on_epoch(s);
  }
  return history;
}

}  // namespace idasnet::pipeline
