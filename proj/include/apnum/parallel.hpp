#pragma once

#include <cstddef>
#include <functional>

namespace apnum {

/// Caps the number of worker threads used by parallel loops. 0 restores the
/// hardware default.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs fn(i) for i in [0, n) over contiguous chunks. Each index is visited
/// exactly once by exactly one thread; callers write to disjoint slots, so
/// results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace apnum
