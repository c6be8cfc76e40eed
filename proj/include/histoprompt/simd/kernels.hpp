#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace histoprompt::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend b) noexcept;

/// Function table for one instruction set. All kernels operate on 64-bit
/// values; inputs of different length are a caller bug.
struct KernelTable {
    Backend backend;
    double (*squared_l2)(const double* a, const double* b, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

/// Reference kernels, always available.
const KernelTable& scalar_kernels() noexcept;

/// Kernels compiled in for this target and supported by the running CPU.
std::vector<Backend> available_backends();

/// Throws std::invalid_argument when the backend is not available.
const KernelTable& kernels_for(Backend b);

/// Best available backend, chosen once at first use. The environment
/// variable HISTOPROMPT_SIMD=scalar|avx2|neon overrides the choice.
const KernelTable& active() noexcept;

inline double squared_l2(std::span<const double> a, std::span<const double> b) {
    return active().squared_l2(a.data(), b.data(), a.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace histoprompt::simd
