#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace sfflab {

/// Worker count from SFFLAB_WORKERS, falling back to the hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) across `workers` threads. Each index is visited
/// exactly once; the first exception (lowest index) is rethrown after join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = worker_count());

/// Realizations per reduction chunk. Chunk boundaries never depend on the
/// worker count, so chunked reductions are bitwise reproducible.
inline constexpr std::size_t kReductionChunk = 16;

/// Deterministic map-reduce: items are folded sequentially within fixed-size
/// chunks, chunks run in parallel, and chunk results merge in chunk order.
template <class Acc, class Fold, class Merge>
Acc chunked_reduce(std::size_t n, const Acc& identity, Fold fold, Merge merge, unsigned workers = worker_count()) {
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    std::vector<Acc> partial(chunks, identity);
    parallel_for(
        chunks,
        [&](std::size_t c) {
            const std::size_t end = std::min(n, (c + 1) * kReductionChunk);
            for (std::size_t i = c * kReductionChunk; i < end; ++i) fold(partial[c], i);
        },
        workers);
    Acc total = identity;
    for (auto& p : partial) merge(total, p);
    return total;
}

}  // namespace sfflab
