#pragma once

#include <cstddef>
#include <functional>

namespace chronocast {

/// Worker cap: CHRONO_THREADS when set and positive, else the hardware
/// concurrency (CHRONO_THREADS=0 also means auto).
unsigned worker_count();

/// Runs fn(i) for i in [0, n). Work items must write only to their own
/// slots so results are identical under any schedule. The first exception
/// thrown by a worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace chronocast
