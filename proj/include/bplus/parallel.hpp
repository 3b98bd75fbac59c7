// parallel.hpp — Deterministic index-parallel loops. Work items write only to
// their own slot and draw randomness from index-derived streams, so the result
// is independent of the thread count and schedule.

#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace bplus {

inline void parallel_for(int jobs, int n, const std::function<void(int)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    int workers = std::min(jobs, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace bplus
