#pragma once

#include <cstddef>
#include <functional>

namespace tio {

// Worker cap from TIO_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

// Run fn(i) for i in [0, n). Work items must be independent; results written
// to per-index slots keep the outcome identical at any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tio
