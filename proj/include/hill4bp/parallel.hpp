#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace hill4bp {

/// Worker count: HILL4BP_THREADS when set to a positive integer, otherwise all
/// hardware threads.
unsigned worker_count();

/// Runs task(i) for i in [0, n_tasks) on up to worker_count() threads.
///
/// Tasks must write only to their own output slots; the first exception thrown
/// by any task is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

/// Independent deterministic stream for batch `stream` of a run seeded with
/// `seed`. Results depend only on (seed, stream), never on scheduling.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace hill4bp
