#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "histoprompt/core/feature_set.hpp"

namespace histoprompt::testing {

// Scratch directory removed on destruction.
class TempDir {
  public:
    TempDir() {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("histoprompt-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline FeatureSet gaussian_features(std::size_t n, std::size_t d, std::uint64_t seed, double mean = 0.0,
                                    double sd = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(mean, sd);
    std::vector<float> v(n * d);
    for (auto& x : v) x = static_cast<float>(dist(gen));
    auto fs = FeatureSet::from_rows(n, d, std::move(v));
    return fs;
}

// Isotropic blobs with centres on a scaled simplex-like lattice, well separated.
struct Blobs {
    Matrix data;
    std::vector<int> truth;
};

inline Blobs make_blobs(std::size_t n, std::size_t d, std::size_t centres, double spread, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, spread);
    std::uniform_real_distribution<double> place(-10.0, 10.0);
    std::vector<std::vector<double>> c(centres, std::vector<double>(d));
    for (auto& row : c) {
        for (auto& x : row) x = place(gen);
    }
    Blobs b{Matrix(n, d), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = i % centres;
        b.truth[i] = static_cast<int>(k);
        for (std::size_t j = 0; j < d; ++j) b.data(i, j) = c[k][j] + noise(gen);
    }
    return b;
}

// Like make_blobs, but centres are redrawn until every pair is at least
// `min_separation` apart.
inline Blobs make_separated_blobs(std::size_t n, std::size_t d, std::size_t centres, double spread,
                                  double min_separation, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, spread);
    std::uniform_real_distribution<double> place(-10.0, 10.0);
    std::vector<std::vector<double>> c;
    while (c.size() < centres) {
        std::vector<double> x(d);
        for (auto& v : x) v = place(gen);
        bool ok = true;
        for (const auto& y : c) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
            ok = ok && std::sqrt(s) >= min_separation;
        }
        if (ok) c.push_back(std::move(x));
    }
    Blobs b{Matrix(n, d), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = i % centres;
        b.truth[i] = static_cast<int>(k);
        for (std::size_t j = 0; j < d; ++j) b.data(i, j) = c[k][j] + noise(gen);
    }
    return b;
}

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace histoprompt::testing
