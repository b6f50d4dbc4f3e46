#pragma once

#include <cstddef>
#include <functional>

namespace idasnet::nn {

/// Caps the worker count used by parallel_for. 0 restores the hardware default.
void set_max_threads(std::size_t n);
std::size_t max_threads();

/// Runs body(i) for every i in [0, count) on up to max_threads() workers.
/// Work is split into contiguous blocks; callers that reduce must do so
/// per index so results do not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace idasnet::nn
