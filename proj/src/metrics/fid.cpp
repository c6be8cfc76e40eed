#include "histoprompt/metrics/fid.hpp"

#include <string>

#include <Eigen/Dense>

#include "histoprompt/core/error.hpp"
#include "histoprompt/simd/kernels.hpp"

namespace histoprompt {

namespace {

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenMatrix> view(const Matrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

double trace(const Matrix& m) {
    double t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

}  // namespace

MetricReport compute_fid(const GaussianMoments& real, const GaussianMoments& synth) {
    const std::size_t d = real.dim();
    if (synth.dim() != d || real.sigma.rows() != d || synth.sigma.rows() != d) {
        throw Error(ErrorCode::DimensionMismatch,
                    "real has dimension " + std::to_string(d) + ", synthetic " + std::to_string(synth.dim()));
    }
    const double mean_term = simd::squared_l2(real.mu, synth.mu);

    // Tr sqrt(S_r S_s) through the symmetric product S_r^1/2 S_s S_r^1/2,
    // which has the same eigenvalues.
    const Matrix root_r = matrix_sqrt_psd(real.sigma);
    const EigenMatrix product = view(root_r) * view(synth.sigma) * view(root_r);
    Matrix symmetric(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            symmetric(r, c) = 0.5 * (product(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +
                                     product(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)));
        }
    }
    const double cross = trace(matrix_sqrt_psd(symmetric));

    double fid = mean_term + trace(real.sigma) + trace(synth.sigma) - 2.0 * cross;
    if (fid < 0.0 && fid > -1e-6) fid = 0.0;

    MetricReport report;
    report.fid = fid;
    report.n_real = real.count;
    report.n_synth = synth.count;
    report.dim = d;
    return report;
}

MetricReport compute_fid(const FeatureSet& real, const FeatureSet& synth) {
    if (real.dim != synth.dim) {
        throw Error(ErrorCode::DimensionMismatch, "real has dimension " + std::to_string(real.dim) + ", synthetic " +
                                                      std::to_string(synth.dim));
    }
    return compute_fid(gaussian_moments(real), gaussian_moments(synth));
}

}  // namespace histoprompt
