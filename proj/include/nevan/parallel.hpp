#pragma once

#include <cstddef>
#include <functional>

namespace nevan {

/// Runs body(0..count-1) on up to `threads` workers. Each index runs exactly once;
/// callers write results into per-index slots and reduce afterwards in index order,
/// which keeps results independent of the thread count. If any body throws, the
/// exception from the smallest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace nevan
