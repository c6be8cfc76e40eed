#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "histoprompt/simd/detail.hpp"
#include "histoprompt/simd/kernels.hpp"

namespace histoprompt::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(HISTOPROMPT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& pick() noexcept {
    const auto backends = available_backends();
    if (const char* env = std::getenv("HISTOPROMPT_SIMD")) {
        const std::string_view want(env);
        for (auto b : backends) {
            if (to_string(b) == want) return kernels_for(b);
        }
    }
    return kernels_for(backends.back());
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::Scalar};
    if (cpu_has_avx2()) out.push_back(Backend::Avx2);
#if defined(HISTOPROMPT_HAVE_NEON)
    out.push_back(Backend::Neon);
#endif
    return out;
}

const KernelTable& kernels_for(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return scalar_kernels();
        case Backend::Avx2:
#if defined(HISTOPROMPT_HAVE_AVX2)
            if (cpu_has_avx2()) return detail::avx2_kernels();
#endif
            break;
        case Backend::Neon:
#if defined(HISTOPROMPT_HAVE_NEON)
            return detail::neon_kernels();
#endif
            break;
    }
    throw std::invalid_argument("SIMD backend not available: " + std::string(to_string(b)));
}

const KernelTable& active() noexcept {
    static const KernelTable& table = pick();
    return table;
}

}  // namespace histoprompt::simd
