#pragma once

#include <cstddef>
#include <functional>

namespace ixai {

// Worker count: IXAI_THREADS if set, else hardware concurrency.
std::size_t default_thread_count();

// Runs fn(i) for i in [0, n). Each index must write only its own output slot;
// results are then independent of scheduling. The exception thrown by the
// lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = 0);

}  // namespace ixai
