#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace qhop {

/// Runs fn(begin, end) over a partition of [0, n) on `threads` threads.
/// Chunks are contiguous and the partition depends only on (n, threads),
/// so writes into disjoint index ranges are race-free and results are
/// deterministic.  threads <= 1 runs inline.
template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        fn(std::int64_t(0), n);
        return;
    }
    const int workers = int(std::min<std::int64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace qhop
