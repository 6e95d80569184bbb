#pragma once

#include <cstddef>
#include <functional>

namespace smm {

/// Thread count from an explicit request, else SMMFIT_THREADS, else the
/// hardware concurrency (at least 1).
int resolve_threads(int requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions
/// thrown by the body are rethrown (the first by index) after all workers join.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace smm
