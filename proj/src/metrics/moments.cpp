#include "histoprompt/metrics/moments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "histoprompt/core/error.hpp"
#include "histoprompt/core/parallel.hpp"
#include "histoprompt/simd/kernels.hpp"

namespace histoprompt {

namespace {

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kSampleBlock = 128;

}  // namespace

GaussianMoments gaussian_moments(const Matrix& data) {
    const std::size_t n = data.rows(), d = data.cols();
    if (n < 2) throw Error(ErrorCode::TooFewPoints, "covariance needs at least 2 rows, got " + std::to_string(n));
    const auto& kern = simd::active();

    GaussianMoments m;
    m.count = n;
    m.mu.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) kern.axpy(1.0, data.row(i).data(), m.mu.data(), d);
    for (auto& v : m.mu) v /= static_cast<double>(n);

    Matrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = data.row(i);
        auto dst = centered.row(i);
        for (std::size_t j = 0; j < d; ++j) dst[j] = src[j] - m.mu[j];
    }

    // Upper triangle, one output row per task; every row sums samples in
    // index order regardless of the thread count.
    m.sigma = Matrix(d, d);
    parallel_for(
        d,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t s0 = 0; s0 < n; s0 += kSampleBlock) {
                const std::size_t s1 = std::min(n, s0 + kSampleBlock);
                for (std::size_t r = begin; r < end; ++r) {
                    double* out = m.sigma.row(r).data() + r;
                    for (std::size_t s = s0; s < s1; ++s) {
                        const double* x = centered.row(s).data();
                        kern.axpy(x[r], x + r, out, d - r);
                    }
                }
            }
        },
        8);
    const double scale = 1.0 / static_cast<double>(n - 1);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r; c < d; ++c) {
            m.sigma(r, c) *= scale;
            m.sigma(c, r) = m.sigma(r, c);
        }
    }
    return m;
}

GaussianMoments gaussian_moments(const FeatureSet& fs) { return gaussian_moments(Matrix::from(fs)); }

Matrix matrix_sqrt_psd(const Matrix& a, double tolerance) {
    const std::size_t d = a.rows();
    if (a.cols() != d) throw Error(ErrorCode::DimensionMismatch, "matrix square root needs a square matrix");
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r + 1; c < d; ++c) {
            const double scale = std::max({1.0, std::abs(a(r, c)), std::abs(a(c, r))});
            if (std::abs(a(r, c) - a(c, r)) > tolerance * scale) {
                throw Error(ErrorCode::NotSymmetric, "entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                                         ") differs from its transpose");
            }
        }
    }
    if (d == 0) return {};
    Eigen::Map<const EigenMatrix> view(a.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const EigenMatrix sym = 0.5 * (view + view.transpose());
    Eigen::SelfAdjointEigenSolver<EigenMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::NotSymmetric, "eigendecomposition did not converge");
    const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const EigenMatrix root = solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();

    Matrix out(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r; c < d; ++c) {
            const double v = 0.5 * (root(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +
                                    root(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)));
            out(r, c) = v;
            out(c, r) = v;
        }
    }
    return out;
}

void save_moments(const GaussianMoments& m, const std::filesystem::path& path) {
    nlohmann::json sigma = nlohmann::json::array();
    for (std::size_t r = 0; r < m.sigma.rows(); ++r) {
        sigma.push_back(std::vector<double>(m.sigma.row(r).begin(), m.sigma.row(r).end()));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << nlohmann::json{{"count", m.count}, {"dim", m.dim()}, {"mu", m.mu}, {"sigma", sigma}}.dump() << '\n';
}

GaussianMoments load_moments(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    try {
        const auto j = nlohmann::json::parse(in);
        GaussianMoments m;
        m.count = j.value("count", std::size_t{0});
        m.mu = j.at("mu").get<std::vector<double>>();
        const auto rows = j.at("sigma").get<std::vector<std::vector<double>>>();
        const std::size_t d = m.mu.size();
        if (rows.size() != d) throw Error(ErrorCode::DimensionMismatch, path.string() + ": sigma is not d x d");
        m.sigma = Matrix(d, d);
        for (std::size_t r = 0; r < d; ++r) {
            if (rows[r].size() != d) throw Error(ErrorCode::DimensionMismatch, path.string() + ": sigma is not d x d");
            std::copy(rows[r].begin(), rows[r].end(), m.sigma.row(r).begin());
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoFailure, path.string() + ": " + e.what());
    }
}

}  // namespace histoprompt
