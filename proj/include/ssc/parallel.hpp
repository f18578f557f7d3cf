#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ssc {

/// Worker count: SSC_WORKERS env var if set, otherwise hardware concurrency.
inline int default_workers() {
    if (const char* env = std::getenv("SSC_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(i) for i in [0, n). Tasks must write to disjoint state; the result
/// must not depend on scheduling. The first exception thrown by any task is
/// rethrown on the calling thread after all workers join.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int workers = default_workers()) {
    if (n == 0) return;
    const std::size_t nthreads = std::min<std::size_t>(std::max(workers, 1), n);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ssc
