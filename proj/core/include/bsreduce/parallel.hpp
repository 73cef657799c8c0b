#pragma once

#include <cstddef>
#include <functional>

namespace bsreduce {

/// Worker count: BSREDUCE_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs task(i) for every i in [0, count) on up to worker_count() threads.
/// Tasks must write to disjoint outputs. The first exception thrown by a
/// task is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace bsreduce
