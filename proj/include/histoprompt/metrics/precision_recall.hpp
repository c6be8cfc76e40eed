#pragma once

#include <cstddef>
#include <vector>

#include "histoprompt/core/feature_set.hpp"

namespace histoprompt {

inline constexpr std::size_t kDefaultPrNeighborhood = 3;

struct PRReport {
    double precision = 0.0;
    double recall = 0.0;
    std::size_t k = 0;
    std::size_t n_real = 0;
    std::size_t n_synth = 0;
};

/// Squared distance from every row to its k-th nearest neighbour among the
/// other rows. Throws TooFewPoints when n <= k.
std::vector<double> knn_squared_radii(const Matrix& points, std::size_t k);

/// Euclidean form of knn_squared_radii.
std::vector<double> knn_radii(const Matrix& points, std::size_t k);

/// Fraction of `queries` inside the union of closed balls around `points`.
/// Comparisons are made on squared distances so a point sitting exactly on
/// a radius counts as inside.
double manifold_coverage(const Matrix& points, const std::vector<double>& squared_radii, const Matrix& queries);

/// Improved precision (synth inside real manifold) and recall (real inside
/// synth manifold) using exact brute-force kNN.
PRReport compute_improved_pr(const Matrix& real, const Matrix& synth, std::size_t k);
PRReport compute_improved_pr(const FeatureSet& real, const FeatureSet& synth, std::size_t k);

}  // namespace histoprompt
