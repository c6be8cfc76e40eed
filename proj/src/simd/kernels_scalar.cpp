#include "histoprompt/simd/kernels.hpp"

namespace histoprompt::simd {

namespace {

double squared_l2_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
    static const KernelTable table{Backend::Scalar, &squared_l2_scalar, &dot_scalar, &axpy_scalar};
    return table;
}

}  // namespace histoprompt::simd
