#include "idasnet/pipeline/train.hpp"

#include <numeric>

#include "idasnet/random.hpp"

namespace idasnet::pipeline {

void TrainConfig::validate(std::size_t train_size) const {
  schedule.validate();
  if (train_size == 0) throw ConfigError("train: empty training set");
  if (batch < 1 || batch > train_size) {
    throw ConfigError("train: batch size must lie in [1, " + std::to_string(train_size) + "]");
  }
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = stream(seed, 0x5EED0000ULL + epoch);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace idasnet::pipeline
