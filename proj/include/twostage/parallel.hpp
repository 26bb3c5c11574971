#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace twostage {

// Runs fn(i) for i in [0, count) across hardware threads. Results must be
// written to index-addressed slots so output is scheduling-independent.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers =
        std::min<std::size_t>(count, hw == 0 ? 1 : hw);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace twostage
