#pragma once

#include <cstddef>
#include <functional>

namespace lrtrunc {

/// Runs fn(i) for i in [0, count) on `workers` threads (0 or 1 = inline).
/// Work is handed out by an atomic counter; callers store results by index
/// and reduce in index order, so outputs never depend on the worker count.
/// The first exception thrown by any task is rethrown on the caller.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace lrtrunc
