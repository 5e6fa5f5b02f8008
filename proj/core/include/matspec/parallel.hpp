#pragma once

#include <cstddef>
#include <functional>

namespace matspec {

// Worker count for library maps. 0 means hardware concurrency.
void set_threads(int n);
int threads();

// Calls f(i) for i in [0, n). Each index is handled by exactly one worker, so
// results written to slot i are independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace matspec
