#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ks {

// Data-parallel width: KS_THREADS if set, else hardware concurrency.
inline unsigned thread_width() {
    if (const char* env = std::getenv("KS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

// Runs fn(i) for i in [begin, end) split into contiguous chunks, one per worker.
// Results must not depend on the partition: disjoint writes only, no shared
// reductions. Reductions stay sequential so output bytes never depend on the
// thread count.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0) return;
    unsigned width = std::min<std::size_t>(thread_width(), count);
    if (width <= 1 || count < 1024) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(width);
    const std::size_t chunk = (count + width - 1) / width;
    for (unsigned w = 0; w < width; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Like parallel_for but hands each worker its whole contiguous range, so the
// body can set up per-worker scratch once.
template <typename Fn>
void parallel_chunks(std::size_t begin, std::size_t end, Fn&& fn) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0) return;
    unsigned width = std::min<std::size_t>(thread_width(), count);
    if (width <= 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(width);
    const std::size_t chunk = (count + width - 1) / width;
    for (unsigned w = 0; w < width; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace ks
