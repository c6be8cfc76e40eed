#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "histoprompt/core/feature_set.hpp"
#include "histoprompt/morphology/kmeans.hpp"

namespace histoprompt {

/// Scattering and separation terms of the SD validity index.
struct SDTerms {
    double scat = 0.0;
    double dis = 0.0;
};

struct SDIndexValue {
    double scat = 0.0;
    double dis = 0.0;
    double sd = 0.0;
};

/// Scat = mean over clusters of ||var(cluster)|| / ||var(X)||;
/// Dis = (Dmax/Dmin) * sum_i 1 / sum_j ||c_i - c_j||.
/// Throws DegenerateData when var(X) is zero and CoincidentCentroids when two
/// centroids coincide.
SDTerms sd_terms(const Matrix& data, const ClusterModel& model, std::span<const int> assignment);
SDTerms sd_terms(const Matrix& data, const ClusterModel& model);

SDIndexValue sd_index(const Matrix& data, const ClusterModel& model, double alpha);
SDIndexValue sd_index(const FeatureSet& fs, const ClusterModel& model, double alpha);

struct SDIndexRow {
    std::size_t k = 0;
    double scat = 0.0;
    double dis = 0.0;
    double sd = 0.0;
};

struct SDIndexReport {
    std::vector<SDIndexRow> per_k;
    double alpha = 0.0;
    std::size_t chosen_k = 0;
};

struct Selection {
    ClusterModel model;
    SDIndexReport report;
};

inline constexpr std::size_t kDefaultSweepMin = 2;
inline constexpr std::size_t kDefaultSweepMax = 50;

/// Fits k-means for every k in [k_min, k_max], weights Scat by
/// alpha = Dis(k_max) and returns the argmin of SD (ties to smaller k).
Selection select_k(const Matrix& data, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                   const KMeansOptions& options = {});
Selection select_k(const FeatureSet& fs, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                   const KMeansOptions& options = {});

/// CSV with header k,scat,dis,sd.
void save_sd_report(const SDIndexReport& report, const std::filesystem::path& path);

}  // namespace histoprompt
