#pragma once

#include <cstddef>
#include <functional>

namespace geodesy {

/// Worker count: hardware concurrency capped by the GEODESY_THREADS environment variable.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across worker threads. Each index runs exactly once;
/// callers write results into per-index slots so output order never depends on scheduling.
/// The first exception thrown by any body is rethrown after all workers join. Calls made from
/// inside a body run serially on the calling worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace geodesy
