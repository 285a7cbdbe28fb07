#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace qfm {

inline int default_threads() {
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : int(h);
}

// Runs body(chunk_index) for chunk_index in [0, n_chunks). Chunks are claimed
// from a shared counter; each chunk writes only to its own pre-assigned slot,
// so the result is identical for any thread count.
inline void parallel_for_chunks(std::size_t n_chunks, int n_threads,
                                const std::function<void(std::size_t)>& body) {
    if (n_threads <= 1 || n_chunks <= 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n_chunks) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    int t = std::min<std::size_t>(n_threads, n_chunks);
    pool.reserve(t);
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace qfm
