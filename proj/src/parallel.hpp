#pragma once

#include <cstdint>
#include <functional>

namespace xover {

// Worker count: min(hardware_concurrency, CROSSOVER_OPTIM_THREADS if set).
// Always >= 1.
int worker_count();

// Runs fn(begin, end) over disjoint chunks of [0, total), possibly from
// multiple threads. Chunk boundaries are deterministic; callers index
// into preallocated output, so the result is independent of scheduling.
void parallel_chunks(std::uint64_t total,
                     const std::function<void(std::uint64_t, std::uint64_t)>& fn);

} // namespace xover
