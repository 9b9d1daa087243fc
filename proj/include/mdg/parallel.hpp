#pragma once

#include <cstddef>
#include <functional>

namespace mdg {

/// Number of workers used by parallel_for; 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Work items must write to disjoint slots;
/// results are then independent of the number of workers. The first
/// exception thrown by any item is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace mdg
