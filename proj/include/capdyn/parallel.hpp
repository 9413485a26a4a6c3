#pragma once
// Deterministic fork-join over an index range: contiguous chunks, per-index
// output slots, no shared mutable state. Results cannot depend on the worker
// count, which the proof determinism guarantee relies on.

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace capdyn::detail {

template <class Fn>
void parallel_index(std::size_t n, int threads, Fn&& fn) {
    int use = std::max(1, threads);
    if (use == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(use), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = n * w / workers;
        std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace capdyn::detail
