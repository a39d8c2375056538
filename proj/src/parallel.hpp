#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace spoilseg::detail {

// Runs body(i) for i in [0, count) across worker threads. Each index is
// handled by exactly one call, so per-index results are independent of the
// thread count.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, unsigned max_threads = 0)
{
    unsigned threads = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace spoilseg::detail
