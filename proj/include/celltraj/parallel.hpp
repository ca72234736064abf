#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace celltraj {

// Runs body(i) for i in [0, n), split across up to `threads` workers. Callers
// write results into slots indexed by i, so the schedule cannot influence the
// output. The lowest-index exception is rethrown after all workers join.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (int i = 0; i < n; ++i)
        if (errors[static_cast<std::size_t>(i)]) std::rethrow_exception(errors[i]);
}

}  // namespace celltraj
