#pragma once

#include <cstddef>
#include <functional>

namespace curveprop {

/// Worker count used by batch evaluations. Defaults to 1; the CLI sets it
/// from --threads or CURVEPROP_THREADS.
int worker_count();
void set_worker_count(int workers);

/// Calls body(i) for i in [0, count). Each index is handled by exactly one
/// worker, so writes to per-index slots need no synchronization and results
/// do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace curveprop
