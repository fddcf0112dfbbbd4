#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace curvlab {

// Process-wide cap on worker threads (the CLI's --threads). 0 restores the
// hardware default.
void set_thread_limit(int n);
int thread_limit();

// Calls body(begin, end) over disjoint blocks of [0, n). Results must be
// written to per-index slots so the outcome does not depend on scheduling.
template <class Body>
void parallel_blocks(std::size_t n, Body body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_limit()), (n + 1023) / 1024);
    if (workers <= 1) {
        if (n > 0) body(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Pairwise (cascade) summation; fixed association order.
double pairwise_sum(std::span<const double> values);

}  // namespace curvlab
