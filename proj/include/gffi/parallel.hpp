#pragma once

#include <cstdint>
#include <functional>

namespace gffi {

/// Resolve a worker count: explicit value if > 0, else GFFI_THREADS, else
/// the hardware concurrency.
int resolve_threads(int requested);

/// Calls fn(i) for i in [0, count) on `threads` workers. Work is handed out
/// in index order; callers store results by index so the outcome does not
/// depend on the worker count. The first exception is rethrown.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace gffi
