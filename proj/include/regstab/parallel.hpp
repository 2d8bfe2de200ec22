#pragma once

#include <cstddef>
#include <functional>

namespace regstab {

/// Worker count: REGION_STABILIZE_THREADS if set to a positive integer,
/// otherwise the hardware concurrency.
std::size_t thread_count();

/// Calls fn(i) for every i in [0, n), spread over thread_count() workers.
/// Work is handed out by index only, so results written to slot i do not
/// depend on the number of threads. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace regstab
