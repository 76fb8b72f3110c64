#pragma once

#include <cstddef>
#include <functional>

namespace ccts {

// Worker count: CCTS_THREADS when set to a positive integer, otherwise the
// number of hardware threads (at least 1).
std::size_t worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index must
// write only its own output slot. The first exception (by index) is rethrown
// after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ccts
