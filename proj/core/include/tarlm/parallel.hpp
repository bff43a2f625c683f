#pragma once

#include <cstddef>
#include <functional>

namespace tarlm {

/// Run fn(0) .. fn(count-1) on up to `threads` worker threads (0 means
/// hardware concurrency). Each index is processed exactly once; fn must only
/// write to per-index slots, which keeps results identical for any thread
/// count. The first exception thrown by fn is rethrown after all workers
/// join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace tarlm
