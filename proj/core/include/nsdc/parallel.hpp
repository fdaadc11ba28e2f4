#pragma once

#include <functional>

namespace nsdc {

/// Worker count for parallel_for: hardware concurrency, capped by the
/// NSDC_MAX_WORKERS environment variable when set.
int worker_limit();

/// Runs body(begin, end) over a partition of [0, n) on worker_limit()
/// threads; runs inline when one worker suffices. Partitioning never changes
/// results: kernels write disjoint ranges and keep a fixed per-element
/// summation order.
void parallel_for(int n, const std::function<void(int begin, int end)>& body);

}  // namespace nsdc
