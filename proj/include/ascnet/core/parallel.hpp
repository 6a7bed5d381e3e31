#pragma once

#include <cstddef>
#include <functional>

namespace ascnet {

// Number of worker threads used by parallel_for. Defaults to
// hardware_concurrency; override with the ASCNET_THREADS environment
// variable. Evaluated once.
int thread_count();

// Runs fn(i) for i in [0, n). Items must be independent: each index writes
// only its own outputs and performs any accumulation it owns sequentially,
// so results are bit-identical for every thread count.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace ascnet
