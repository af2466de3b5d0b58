#pragma once

#include <cstddef>
#include <functional>

namespace rdt {

/// Worker threads for independent jobs: RDT_THREADS when set to a positive
/// integer, otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs job(i) for i in [0, count) on up to worker_count() threads. The first
/// exception (lowest index) is rethrown after all jobs finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job);

}  // namespace rdt
