#pragma once

#include <cstddef>
#include <functional>

namespace ivp {

// Worker count used by library loops when none is given explicitly.
void set_default_threads(int n);
int default_threads();

// Runs body(i) for i in [0, n) across `threads` workers (0 means the default).
// Work is split into contiguous static chunks; callers write results into
// per-index slots so the outcome never depends on scheduling.  The first
// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace ivp
