#pragma once

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace topomask {

// Thread count from TOPOMASK_THREADS, defaulting to machine parallelism.
inline std::size_t thread_count() {
    if (const char* env = std::getenv("TOPOMASK_THREADS")) {
        long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Static range split across threads. Each index is processed exactly once
// and bodies must not share mutable state, so results are identical for any
// thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::size_t threads = thread_count();
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (threads > n) threads = n;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        std::size_t begin = n * t / threads;
        std::size_t end = n * (t + 1) / threads;
        pool.emplace_back([begin, end, &body] {
            for (std::size_t i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace topomask
