#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "histoprompt/core/feature_set.hpp"

namespace histoprompt {

struct ClusterModel {
    std::size_t k = 0;
    Matrix centroids;  // k x d
    std::uint64_t seed = 0;
    double inertia = 0.0;
    std::size_t iterations = 0;
    /// Inertia after each assignment step of the last fit.
    std::vector<double> inertia_trace;

    std::size_t dim() const noexcept { return centroids.cols(); }
};

struct KMeansOptions {
    double tolerance = 1e-6;  // max centroid shift (Euclidean) to stop
    std::size_t max_iterations = 300;
};

/// k-means++ seeding followed by Lloyd iterations. Deterministic for a given
/// (data, k, seed). Empty clusters are re-seeded with the point farthest from
/// its assigned centroid. Throws TooFewPoints when n < k.
ClusterModel kmeans_fit(const Matrix& data, std::size_t k, std::uint64_t seed,
                        const KMeansOptions& options = {});
ClusterModel kmeans_fit(const FeatureSet& fs, std::size_t k, std::uint64_t seed,
                        const KMeansOptions& options = {});

/// Nearest centroid per row; ties go to the lowest index.
std::vector<int> assign(const ClusterModel& model, const Matrix& data);
std::vector<int> assign(const ClusterModel& model, const FeatureSet& fs);

/// JSON: {"k", "seed", "dim", "inertia", "centroids": base64 of f64le row-major}.
void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel load_cluster_model(const std::filesystem::path& path);

}  // namespace histoprompt
