#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dyadic {

/// Evaluates fn(block) for block in [0, n_blocks) on a small thread pool and
/// returns the results indexed by block. The caller reduces them in index
/// order, which keeps floating-point sums independent of the schedule.
/// The first exception thrown by any block is rethrown after all workers join.
template <class Result, class Fn>
std::vector<Result> map_blocks(std::size_t n_blocks, Fn&& fn, unsigned threads = 0) {
    std::vector<Result> out(n_blocks);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));

    if (threads <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) out[b] = fn(b);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            try {
                out[b] = fn(b);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n_blocks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace dyadic
