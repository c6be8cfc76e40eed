#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "histoprompt/core/feature_set.hpp"

namespace histoprompt {

struct GaussianMoments {
    std::vector<double> mu;
    Matrix sigma;  // d x d sample covariance (divisor n - 1)
    std::size_t count = 0;

    std::size_t dim() const noexcept { return mu.size(); }
};

/// Column means and unbiased covariance, symmetrized. Throws TooFewPoints
/// for n < 2.
GaussianMoments gaussian_moments(const Matrix& data);
GaussianMoments gaussian_moments(const FeatureSet& fs);

/// Symmetric PSD square root: eigenvalues below zero are clamped. Throws
/// NotSymmetric when |a - a^T| exceeds `tolerance` anywhere.
Matrix matrix_sqrt_psd(const Matrix& a, double tolerance = 1e-6);

/// JSON {"count", "dim", "mu": [...], "sigma": [[...]...]}.
void save_moments(const GaussianMoments& m, const std::filesystem::path& path);
GaussianMoments load_moments(const std::filesystem::path& path);

}  // namespace histoprompt
