#pragma once

#include <cstddef>
#include <functional>

namespace sdm {

/// Number of workers used when a caller passes 0: the SDM_WORKERS environment
/// variable if set and positive, otherwise std::thread::hardware_concurrency().
std::size_t default_worker_count();

/// Runs body(i) for i in [0, count) on at most `workers` threads.
///
/// Indices are handed out dynamically, so completion order is arbitrary;
/// callers write results into pre-sized slots indexed by i. The first
/// exception thrown by any task is rethrown after all workers have joined.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace sdm
