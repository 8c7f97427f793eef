#pragma once

#include <cstddef>
#include <functional>

namespace codim2 {

/// Worker count: hardware concurrency, capped by CODIM2_THREADS when set.
int worker_threads();

/// Runs body(i) for i in [0, count). Each index is processed by exactly one
/// thread and results must be written to disjoint storage, so output never
/// depends on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace codim2
