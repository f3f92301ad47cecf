#pragma once

#include <cstddef>
#include <functional>

namespace nqsim {

// Worker count: hardware concurrency, capped by NQSIM_THREADS when set.
unsigned thread_count();

// Calls fn(i) for i in [0, n) on up to thread_count() threads. Results must
// be written to per-index slots; the first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nqsim
