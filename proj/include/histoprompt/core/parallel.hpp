#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace histoprompt {

std::size_t worker_count() noexcept;

/// Runs body(begin, end) over contiguous chunks of [0, n) on worker threads.
/// Chunks write disjoint outputs; callers reduce sequentially afterwards so
/// results do not depend on the thread count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 64) {
    const std::size_t workers = std::min(worker_count(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
    if (workers <= 1) {
        if (n > 0) body(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
}

}  // namespace histoprompt
