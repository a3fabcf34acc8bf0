#pragma once

#include <cstddef>
#include <functional>

namespace mcquad {

// Process-wide cap on worker threads. 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Calls fn(i) for i in [0, n) split into contiguous chunks across threads.
// fn must only write state owned by index i; results are then independent of
// the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mcquad
