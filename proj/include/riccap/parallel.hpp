#pragma once

#include <cstddef>
#include <functional>

namespace riccap {

/// Number of worker threads: hardware concurrency, capped by the
/// RICCATI_CAPACITY_THREADS environment variable when it is set. At least 1.
unsigned worker_count();

/// Calls body(i) for i in [0, count) on up to `workers` threads (0 selects
/// worker_count()). Work is handed out by index, so results written to
/// per-index slots do not depend on scheduling. The first exception thrown by
/// any body is rethrown after all threads have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

}  // namespace riccap
