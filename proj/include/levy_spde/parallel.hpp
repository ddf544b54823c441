#pragma once

#include <cstddef>
#include <functional>

namespace levy_spde {

/// Worker count: LEVY_SPDE_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/**
 * Runs body(begin, end) over contiguous chunks of [0, n). Chunks are fixed by
 * (n, thread_count()) so callers that write per-index results and reduce
 * serially get identical output for any thread count.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace levy_spde
