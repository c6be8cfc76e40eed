#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "histoprompt/core/error.hpp"
#include "histoprompt/metrics/fid.hpp"
#include "histoprompt/metrics/moments.hpp"
#include "histoprompt/metrics/precision_recall.hpp"

namespace histoprompt {
namespace {

using testing::gaussian_features;

Matrix from_eigen(const Eigen::MatrixXd& e) {
    Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    for (Eigen::Index r = 0; r < e.rows(); ++r) {
        for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
    }
    return m;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
    }
    return e;
}

TEST(Moments, HandArithmetic) {
    Matrix m(2, 2);
    m(1, 0) = 2;
    const auto g = gaussian_moments(m);
    EXPECT_EQ(g.mu, (std::vector<double>{1, 0}));
    EXPECT_EQ(g.sigma(0, 0), 2.0);
    EXPECT_EQ(g.sigma(0, 1), 0.0);
    EXPECT_EQ(g.sigma(1, 1), 0.0);

    Matrix same(2, 3, 1.5);
    const auto z = gaussian_moments(same);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(z.sigma.data()[i], 0.0);

    EXPECT_THROW(gaussian_moments(Matrix(1, 3)), Error);
}

TEST(Moments, MatchesTwoPassOracle) {
    const auto fs = gaussian_features(50, 4, 3, 2.0, 3.0);
    const auto m = Matrix::from(fs);
    const auto g = gaussian_moments(m);
    std::vector<double> mu(4, 0);
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = 0; j < 4; ++j) mu[j] += m(i, j) / 50;
    }
    for (std::size_t a = 0; a < 4; ++a) {
        EXPECT_NEAR(g.mu[a], mu[a], 1e-12);
        for (std::size_t b = 0; b < 4; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < 50; ++i) s += (m(i, a) - mu[a]) * (m(i, b) - mu[b]);
            EXPECT_NEAR(g.sigma(a, b), s / 49, 1e-12);
            EXPECT_EQ(g.sigma(a, b), g.sigma(b, a));
        }
    }
}

TEST(Moments, LargeDimensionMatchesEigen) {
    const auto fs = gaussian_features(700, 150, 8);
    const auto g = gaussian_moments(fs);
    const Eigen::MatrixXd x = to_eigen(Matrix::from(fs));
    const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = centred.transpose() * centred / 699.0;
    EXPECT_LT((to_eigen(g.sigma) - cov).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Moments, FileRoundTrip) {
    testing::TempDir dir;
    const auto g = gaussian_moments(gaussian_features(20, 3, 1));
    save_moments(g, dir / "m.json");
    const auto back = load_moments(dir / "m.json");
    EXPECT_EQ(back.mu, g.mu);
    EXPECT_EQ(back.count, 20u);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(back.sigma.data()[i], g.sigma.data()[i]);
}

TEST(MatrixSqrt, KnownValues) {
    const auto id = matrix_sqrt_psd(from_eigen(Eigen::MatrixXd::Identity(3, 3)));
    EXPECT_LT((to_eigen(id) - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-15);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 9;
    const auto r = to_eigen(matrix_sqrt_psd(from_eigen(d)));
    EXPECT_NEAR(r(0, 0), 2, 1e-15);
    EXPECT_NEAR(r(1, 1), 3, 1e-15);
    EXPECT_NEAR(r(0, 1), 0, 1e-15);
}

TEST(MatrixSqrt, ReconstructsRandomPsd) {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 2 + trial * 3;
        Eigen::MatrixXd b(d, d - 1);  // rank deficient on purpose
        for (int i = 0; i < b.size(); ++i) b.data()[i] = n01(gen);
        const Eigen::MatrixXd a = b * b.transpose();
        const auto s = to_eigen(matrix_sqrt_psd(from_eigen(a)));
        EXPECT_LT((s * s - a).norm(), 1e-6);
        EXPECT_LT((s - s.transpose()).norm(), 1e-12);
    }
}

TEST(MatrixSqrt, RejectsAsymmetric) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
    a(0, 1) = 0.5;
    try {
        matrix_sqrt_psd(from_eigen(a));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
    }
}

GaussianMoments moments(std::vector<double> mu, const Eigen::MatrixXd& sigma) {
    return {std::move(mu), from_eigen(sigma), 100};
}

TEST(Fid, UnitMeanShiftWithEqualCovariance) {
    const auto r = compute_fid(moments({0, 0}, Eigen::MatrixXd::Identity(2, 2)),
                               moments({1, 0}, Eigen::MatrixXd::Identity(2, 2)));
    EXPECT_NEAR(r.fid, 1.0, 1e-12);
    EXPECT_EQ(r.dim, 2u);
}

TEST(Fid, TraceTermMatchesEigenvaluesOfProduct) {
    // Oracle: Tr sqrt(AB) = sum of sqrt of the (real, non-negative) eigenvalues of AB.
    std::mt19937_64 gen(6);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 8; ++trial) {
        const int d = 3 + trial;
        Eigen::MatrixXd p(d, d + 2), q(d, d + 2);
        for (int i = 0; i < p.size(); ++i) p.data()[i] = n01(gen);
        for (int i = 0; i < q.size(); ++i) q.data()[i] = n01(gen);
        const Eigen::MatrixXd a = p * p.transpose(), b = q * q.transpose();
        std::vector<double> mu1(d), mu2(d);
        double mean_term = 0;
        for (int i = 0; i < d; ++i) {
            mu1[i] = n01(gen);
            mu2[i] = n01(gen);
            mean_term += (mu1[i] - mu2[i]) * (mu1[i] - mu2[i]);
        }
        const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(a * b).eigenvalues();
        double tr_sqrt = 0;
        for (int i = 0; i < d; ++i) tr_sqrt += std::sqrt(std::max(0.0, ev[i].real()));
        const double expected = mean_term + a.trace() + b.trace() - 2 * tr_sqrt;
        const auto r = compute_fid(moments(mu1, a), moments(mu2, b));
        EXPECT_NEAR(r.fid, expected, 1e-8 * (1 + expected));
        EXPECT_NEAR(compute_fid(moments(mu2, b), moments(mu1, a)).fid, r.fid, 1e-6);
    }
}

TEST(Fid, SelfDistanceIsZero) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto fs = gaussian_features(200 + 50 * s, 8 + s, s);
        EXPECT_LE(compute_fid(fs, fs).fid, 1e-3);
    }
}

TEST(Fid, MeanShiftAddsSquaredNorm) {
    const auto base = gaussian_features(300, 5, 2);
    const auto m = gaussian_moments(base);
    double prev = 0;
    for (double delta : {0.5, 1.0, 2.0}) {
        auto shifted = m;
        shifted.mu[0] += delta;
        const double f = compute_fid(m, shifted).fid;
        EXPECT_NEAR(f, delta * delta, 1e-6);
        EXPECT_GT(f, prev);
        prev = f;
    }
}

TEST(Fid, DimensionMismatch) {
    try {
        compute_fid(gaussian_features(10, 3, 1), gaussian_features(10, 4, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

// Brute-force oracle straight from the definition.
std::pair<double, double> pr_oracle(const Matrix& real, const Matrix& synth, std::size_t k) {
    auto d2 = [](std::span<const double> a, std::span<const double> b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return s;
    };
    auto radii = [&](const Matrix& x) {
        std::vector<double> r(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            std::vector<double> all;
            for (std::size_t j = 0; j < x.rows(); ++j) {
                if (j != i) all.push_back(d2(x.row(i), x.row(j)));
            }
            std::sort(all.begin(), all.end());
            r[i] = all[k - 1];
        }
        return r;
    };
    auto coverage = [&](const Matrix& x, const std::vector<double>& r, const Matrix& q) {
        std::size_t in = 0;
        for (std::size_t a = 0; a < q.rows(); ++a) {
            bool inside = false;
            for (std::size_t b = 0; b < x.rows() && !inside; ++b) inside = d2(q.row(a), x.row(b)) <= r[b];
            in += inside;
        }
        return static_cast<double>(in) / static_cast<double>(q.rows());
    };
    return {coverage(real, radii(real), synth), coverage(synth, radii(synth), real)};
}

Matrix random_points(std::mt19937_64& gen, std::size_t n, std::size_t d, bool lattice, double shift) {
    std::normal_distribution<double> n01;
    std::uniform_int_distribution<int> grid(-6, 6);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) m(i, j) = (lattice ? grid(gen) * 0.5 : n01(gen)) + shift;
    }
    return m;
}

TEST(PrecisionRecall, MatchesBruteForceOracleExactly) {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 30; ++trial) {
        const bool lattice = trial % 2 == 0;  // lattice points make ties at the radius common
        const std::size_t k = std::array<std::size_t, 3>{1, 3, 5}[trial % 3];
        const auto real = random_points(gen, 50 + trial, 1 + trial % 4, lattice, 0.0);
        const auto synth = random_points(gen, 40 + 2 * trial, 1 + trial % 4, lattice, 0.3);
        const auto r = compute_improved_pr(real, synth, k);
        const auto [p, rc] = pr_oracle(real, synth, k);
        EXPECT_EQ(r.precision, p) << "trial " << trial;
        EXPECT_EQ(r.recall, rc) << "trial " << trial;
        const auto swapped = compute_improved_pr(synth, real, k);
        EXPECT_EQ(r.precision, swapped.recall);
        EXPECT_EQ(r.recall, swapped.precision);
    }
}

TEST(PrecisionRecall, IdenticalAndSeparatedSets) {
    std::mt19937_64 gen(2);
    const auto a = random_points(gen, 60, 4, false, 0.0);
    const auto same = compute_improved_pr(a, a, 3);
    EXPECT_EQ(same.precision, 1.0);
    EXPECT_EQ(same.recall, 1.0);
    const auto far = random_points(gen, 60, 4, false, 1e7);
    const auto sep = compute_improved_pr(a, far, 3);
    EXPECT_EQ(sep.precision, 0.0);
    EXPECT_EQ(sep.recall, 0.0);
}

TEST(PrecisionRecall, MonotoneInK) {
    std::mt19937_64 gen(8);
    const auto a = random_points(gen, 120, 3, false, 0.0);
    const auto b = random_points(gen, 100, 3, false, 0.8);
    double p = 0, r = 0;
    for (std::size_t k = 1; k <= 10; ++k) {
        const auto x = compute_improved_pr(a, b, k);
        EXPECT_GE(x.precision, p);
        EXPECT_GE(x.recall, r);
        p = x.precision;
        r = x.recall;
    }
}

TEST(PrecisionRecall, NeedsMoreThanKPoints) {
    std::mt19937_64 gen(1);
    const auto a = random_points(gen, 3, 2, false, 0);
    try {
        compute_improved_pr(a, a, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
    }
}

TEST(PrecisionRecall, RadiiAreKthNeighbour) {
    Matrix pts(4, 1);
    pts(1, 0) = 1;
    pts(2, 0) = 3;
    pts(3, 0) = 7;
    EXPECT_EQ(knn_radii(pts, 1), (std::vector<double>{1, 1, 2, 4}));
    EXPECT_EQ(knn_radii(pts, 2), (std::vector<double>{3, 2, 3, 6}));
}

}  // namespace
}  // namespace histoprompt
