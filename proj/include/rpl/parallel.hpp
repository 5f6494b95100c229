#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rpl {

inline unsigned hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Runs fn(i) for i in [0, n). Work is handed out in fixed-size chunks so the
// set of indices seen by fn never depends on the worker count; callers keep
// determinism by writing results into slot i and reducing sequentially.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn, std::size_t chunk = 256) {
    if (n == 0) return;
    if (threads <= 1 || n <= chunk) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const std::size_t end = begin + chunk < n ? begin + chunk : n;
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace rpl
