#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace hop {

/// Static block partition of [begin, end) over hardware threads.
/// fn(i) must write only to i-dependent locations; results are then
/// independent of the worker count.
template <typename Fn>
void parallel_for(size_t begin, size_t end, Fn&& fn) {
    size_t n = end > begin ? end - begin : 0;
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    size_t workers = std::min<size_t>(hw ? hw : 1, n);
    if (workers <= 1) {
        for (size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    size_t chunk = (n + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        size_t lo = begin + w * chunk;
        size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace hop
