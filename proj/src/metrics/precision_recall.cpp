#include "histoprompt/metrics/precision_recall.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "histoprompt/core/error.hpp"
#include "histoprompt/core/parallel.hpp"
#include "histoprompt/simd/kernels.hpp"

namespace histoprompt {

std::vector<double> knn_squared_radii(const Matrix& points, std::size_t k) {
    const std::size_t n = points.rows(), d = points.cols();
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (n <= k) {
        throw Error(ErrorCode::TooFewPoints, "k=" + std::to_string(k) + " neighbours need more than k points, got " +
                                                 std::to_string(n));
    }
    const auto& kern = simd::active();
    std::vector<double> radii(n);
    parallel_for(
        n,
        [&](std::size_t begin, std::size_t end) {
            std::vector<double> dist(n - 1);
            for (std::size_t i = begin; i < end; ++i) {
                std::size_t m = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) dist[m++] = kern.squared_l2(points.row(i).data(), points.row(j).data(), d);
                }
                std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
                radii[i] = dist[k - 1];
            }
        },
        16);
    return radii;
}

std::vector<double> knn_radii(const Matrix& points, std::size_t k) {
    auto r = knn_squared_radii(points, k);
    for (auto& v : r) v = std::sqrt(v);
    return r;
}

double manifold_coverage(const Matrix& points, const std::vector<double>& squared_radii, const Matrix& queries) {
    if (points.cols() != queries.cols()) throw Error(ErrorCode::DimensionMismatch, "points and queries differ in dimension");
    if (squared_radii.size() != points.rows()) throw Error(ErrorCode::CountMismatch, "one radius per point required");
    if (queries.rows() == 0) return 0.0;
    const auto& kern = simd::active();
    const std::size_t d = points.cols();
    std::vector<char> inside(queries.rows(), 0);
    parallel_for(
        queries.rows(),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t q = begin; q < end; ++q) {
                for (std::size_t i = 0; i < points.rows(); ++i) {
                    if (kern.squared_l2(queries.row(q).data(), points.row(i).data(), d) <= squared_radii[i]) {
                        inside[q] = 1;
                        break;
                    }
                }
            }
        },
        16);
    const auto count = std::count(inside.begin(), inside.end(), 1);
    return static_cast<double>(count) / static_cast<double>(queries.rows());
}

PRReport compute_improved_pr(const Matrix& real, const Matrix& synth, std::size_t k) {
    if (real.cols() != synth.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "real has dimension " + std::to_string(real.cols()) + ", synthetic " +
                                                      std::to_string(synth.cols()));
    }
    PRReport report;
    report.k = k;
    report.n_real = real.rows();
    report.n_synth = synth.rows();
    const auto real_radii = knn_squared_radii(real, k);
    const auto synth_radii = knn_squared_radii(synth, k);
    report.precision = manifold_coverage(real, real_radii, synth);
    report.recall = manifold_coverage(synth, synth_radii, real);
    return report;
}

PRReport compute_improved_pr(const FeatureSet& real, const FeatureSet& synth, std::size_t k) {
    return compute_improved_pr(Matrix::from(real), Matrix::from(synth), k);
}

}  // namespace histoprompt
