#pragma once

#include <cstddef>

namespace idasnet::nn {

/// Linear warmup from zero to lr_max over `warmup` epochs, then a half-cosine
/// decay that reaches lr_min at epoch `total`. Epochs are 1-based.
struct LrSchedule {
  double lr_min = 1e-5;
  double lr_max = 2e-3;
  std::size_t warmup = 5;
  std::size_t total = 50;

  void validate() const;
  double at(std::size_t epoch) const;
  /// The same curve at a real-valued epoch t in [0, total].
  double at_time(double t) const;
};

inline double lr_at_epoch(const LrSchedule& sched, std::size_t epoch) { return sched.at(epoch); }

}  // namespace idasnet::nn
