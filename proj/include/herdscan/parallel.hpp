#pragma once

#include <cstddef>
#include <functional>

namespace herdscan {

/// Worker cap: HERDSCAN_THREADS when set and positive, else hardware concurrency.
std::size_t thread_limit();

/// Runs body(0..count-1) on up to `threads` workers. The exception of the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

}  // namespace herdscan
