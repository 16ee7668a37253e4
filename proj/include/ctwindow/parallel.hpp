#pragma once

#include <cstddef>
#include <functional>

namespace ctwindow {

/// Worker cap from CTWINDOW_THREADS; unset, 0 or unparsable means one per hardware thread.
std::size_t worker_count();

/// Run fn(i) for i in [0, n) on up to `workers` threads. Work items must write
/// to disjoint outputs. The first exception thrown by any item is rethrown
/// after all workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t workers = worker_count());

} // namespace ctwindow
