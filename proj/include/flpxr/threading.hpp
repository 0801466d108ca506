#pragma once

#include <cstddef>
#include <functional>

namespace flpxr {

// Worker count: FLPXR_THREADS when set to a positive integer, otherwise
// hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one
// per worker; each index is processed by exactly one thread, so results
// written to per-index slots are independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace flpxr
