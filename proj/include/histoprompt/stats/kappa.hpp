#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "histoprompt/stats/responses.hpp"

namespace histoprompt {

inline constexpr double kReliabilityCriterion = 0.21;

struct KappaResult {
    double kappa = 0.0;
    double observed = 0.0;  // p_o
    double expected = 0.0;  // p_e
    bool degenerate = false;  // p_e == 1
    std::string_view interpretation;
};

/// Qualitative band for a kappa value.
std::string_view interpret_kappa(double kappa) noexcept;

/// Cohen's kappa over categorical labels. Throws LengthMismatch, EmptyInput.
KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b);

enum class KappaSubset { All, TruthReal, TruthSynthetic };

struct KappaSummary {
    std::vector<std::string> readers;
    std::vector<std::vector<double>> pairwise;  // symmetric, diagonal 1
    double mu = 0.0;
    double sigma = 0.0;  // population sd of the off-diagonal (i < j) entries
    struct Pair {
        std::size_t a = 0;
        std::size_t b = 0;
        double kappa = 0.0;
        std::string_view interpretation;
        bool meets_criterion = false;
        bool degenerate = false;
    };
    std::vector<Pair> pairs;
};

/// Per-reader dichotomized labels over the same items. Rows = readers.
KappaSummary pairwise_kappa_summary(const std::vector<std::string>& readers,
                                    const std::vector<std::vector<int>>& labels);

/// Builds the label matrix from responses (items common to all readers,
/// restricted to the subset by truth) and summarizes it.
KappaSummary pairwise_kappa_summary(const std::vector<ResponseRecord>& responses, KappaSubset subset);

}  // namespace histoprompt
