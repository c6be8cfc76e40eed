#pragma once

#include <cstddef>

#include "histoprompt/core/feature_set.hpp"
#include "histoprompt/metrics/moments.hpp"

namespace histoprompt {

struct MetricReport {
    double fid = 0.0;
    std::size_t n_real = 0;
    std::size_t n_synth = 0;
    std::size_t dim = 0;
};

/// Frechet distance between two Gaussians:
/// |mu_r - mu_s|^2 + Tr(S_r + S_s - 2 (S_r^1/2 S_s S_r^1/2)^1/2).
/// Results in (-1e-6, 0) are clamped to 0. Throws DimensionMismatch.
MetricReport compute_fid(const GaussianMoments& real, const GaussianMoments& synth);
MetricReport compute_fid(const FeatureSet& real, const FeatureSet& synth);

}  // namespace histoprompt
