#include "histoprompt/core/random.hpp"

#include <numeric>

namespace histoprompt {

std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k && i < n; ++i) {
        std::swap(pool[i], pool[i + below(n - i)]);
    }
    pool.resize(std::min(k, n));
    return pool;
}

}  // namespace histoprompt
