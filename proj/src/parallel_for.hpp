#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace simwt::detail {

// Runs fn(i) for i in [0, count) on up to `jobs` threads (0 = hardware
// concurrency). Each index is handled exactly once; callers own any output
// slots, so results are identical under every schedule.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    unsigned threads = jobs > 0 ? static_cast<unsigned>(jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
    if (threads > count) threads = static_cast<unsigned>(count == 0 ? 1 : count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace simwt::detail
