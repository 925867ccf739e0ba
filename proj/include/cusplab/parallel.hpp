#pragma once

#include <cstddef>
#include <functional>

namespace cusplab {

// Worker count used when a call passes threads = 0. Starts at the hardware concurrency.
void set_default_threads(unsigned threads);
unsigned default_threads();

// Runs body(i) for i in [0, count) on up to `threads` workers; indices are handed out in
// order from a shared counter. The first exception thrown by a body is rethrown after all
// workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace cusplab
