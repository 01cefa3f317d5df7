#pragma once

#include <cstddef>
#include <functional>

namespace datamech {

/// Worker budget: DATAMECH_THREADS when set (minimum 1), otherwise the
/// hardware concurrency.
std::size_t thread_budget();

/// Runs fn(i) for i in [0, count) across the thread budget. Each index is
/// processed exactly once; callers keep results deterministic by writing only
/// to slot i. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace datamech
