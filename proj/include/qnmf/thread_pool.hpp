#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace qnmf {

// Worker cap: QNMF_THREADS when set, otherwise hardware concurrency.
inline int worker_count() {
    int n = int(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("QNMF_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

// Runs fn(i) for i in [0, n). Work items must be independent; callers that
// need determinism should write results into per-index slots and combine
// sequentially afterwards.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn);

// Computes compute(i) in parallel, chunk by chunk, and feeds results to
// consume(i, ...) in index order. Keeps at most `chunk` results alive, and
// the sequential consume order makes the combined result independent of
// scheduling.
template <typename T>
void chunked_parallel_map(size_t n, size_t chunk, const std::function<T(size_t)>& compute,
                          const std::function<void(size_t, T&)>& consume) {
    std::vector<T> buf;
    for (size_t start = 0; start < n; start += chunk) {
        const size_t count = std::min(chunk, n - start);
        buf.clear();
        buf.resize(count);
        parallel_for(count, [&](size_t i) { buf[i] = compute(start + i); });
        for (size_t i = 0; i < count; ++i) consume(start + i, buf[i]);
    }
}

inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    const int workers = std::min<size_t>(worker_count(), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace qnmf
