#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace scalediff {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Calls f(i) for i in [0, n) on up to `workers` threads. Work is handed out
// in fixed chunks; callers write results by index, so output never depends on
// scheduling. The first exception thrown by any f is rethrown here.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& f, std::size_t chunk = 16) {
    if (workers <= 1 || n <= chunk) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
        for (;;) {
            const std::size_t start = next.fetch_add(chunk);
            if (start >= n) return;
            const std::size_t end = std::min(n, start + chunk);
            try {
                for (std::size_t i = start; i < end; ++i) f(i);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(workers, (n + chunk - 1) / chunk));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace scalediff
