#pragma once

#include <cstddef>
#include <functional>

namespace newton_chaos {

/// Upper bound on worker threads used by library scans. 0 restores the
/// default (NEWTON_CHAOS_THREADS if set, else hardware concurrency).
void set_thread_limit(unsigned n);
unsigned thread_limit();

/// Calls body(i) for i in [0, n) across up to thread_limit() threads.
/// Each index is visited exactly once; callers write results by index so the
/// outcome does not depend on scheduling. The first exception (lowest chunk)
/// is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace newton_chaos
