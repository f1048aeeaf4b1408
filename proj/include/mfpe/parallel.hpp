#pragma once

#include <cstddef>
#include <functional>

namespace mfpe {

/// Name of the environment variable capping the worker count.
inline constexpr const char* kWorkersEnv = "MFPE_WORKERS";

/// Worker count: MFPE_WORKERS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls body(i) for every i in [0, n) on up to `workers` threads. Each index
/// must write only to its own output slot; results are therefore independent
/// of the worker count. The first exception thrown (lowest index) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = worker_count());

}  // namespace mfpe
