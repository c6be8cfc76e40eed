#include "histoprompt/core/parallel.hpp"

#include <cstdlib>
#include <string>

namespace histoprompt {

std::size_t worker_count() noexcept {
    static const std::size_t count = [] {
        if (const char* env = std::getenv("HISTOPROMPT_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) return static_cast<std::size_t>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return static_cast<std::size_t>(hw == 0 ? 1 : hw);
    }();
    return count;
}

}  // namespace histoprompt
