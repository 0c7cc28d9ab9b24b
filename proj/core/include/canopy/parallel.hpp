#pragma once

#include <cstddef>
#include <functional>

namespace canopy {

/// Worker count used by parallel_for. Defaults to CANOPY_THREADS when set,
/// otherwise hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs body(i) for i in [0, n). Work is split into contiguous index blocks;
/// callers write results into slot i so output order never depends on the
/// number of workers. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace canopy
