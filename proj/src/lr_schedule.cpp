#include "idasnet/nn/lr_schedule.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "idasnet/errors.hpp"

namespace idasnet::nn {

void LrSchedule::validate() const {
  if (!(lr_min >= 0.0) || !(lr_min <= lr_max)) {
    throw ConfigError("lr schedule requires 0 <= lr_min <= lr_max");
  }
  if (!(warmup > 0 && warmup < total)) {
    throw ConfigError("lr schedule requires 0 < warmup < total epochs");
  }
}

double LrSchedule::at(std::size_t epoch) const {
  validate();
  if (epoch < 1 || epoch > total) {
    throw DomainError("epoch " + std::to_string(epoch) + " outside [1, " + std::to_string(total) +
                      "]");
  }
  return at_time(static_cast<double>(epoch));
}

double LrSchedule::at_time(double t) const {
  validate();
  if (!(t >= 0.0 && t <= static_cast<double>(total))) {
    throw DomainError("time outside [0, " + std::to_string(total) + "]");
  }
  const double tw = static_cast<double>(warmup);
  if (t <= tw) return lr_max * t / tw;
  const double phase = (t - tw) / (static_cast<double>(total) - tw);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(phase * std::numbers::pi));
}

}  // namespace idasnet::nn
