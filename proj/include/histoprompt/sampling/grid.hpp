#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "histoprompt/core/manifest.hpp"

namespace histoprompt {

struct SamplingPlan {
    std::size_t regime = 0;
    std::size_t ratio_pct = 0;
    std::size_t fold = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> real_ids;
    std::vector<std::string> synthetic_ids;
};

struct GridSpec {
    std::vector<std::size_t> regimes{10, 25, 50, 100, 500, 1000, 10000};
    std::vector<std::size_t> ratios_pct{0, 25, 50, 100, 200, 300};
    std::size_t folds = 10;
    std::uint64_t seed = 0;
};

/// round(regime * ratio_pct / 100), half away from zero.
std::size_t synthetic_count(std::size_t regime, std::size_t ratio_pct);

/// One plan per (regime, ratio, fold), in that nesting order. Each plan is
/// seeded by derive_seed(seed, regime, ratio, fold); draws are without
/// replacement and split 50/50 by label when two labels can supply it.
/// Throws InsufficientData.
std::vector<SamplingPlan> make_grid(const GridSpec& spec, const DatasetManifest& real,
                                    const DatasetManifest& synth);

struct GridResult {
    std::size_t regime = 0;
    std::size_t ratio_pct = 0;
    std::size_t fold = 0;
    double auc = 0.0;
};

struct CellSummary {
    std::size_t regime = 0;
    std::size_t ratio_pct = 0;
    std::size_t count = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct GridSummary {
    std::vector<CellSummary> cells;  // sorted by (regime, ratio)
};

/// Quantile by linear interpolation between order statistics
/// (position q * (n - 1)); q = 0.5 gives the usual median.
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Every (regime, ratio) cell present in `expected` must have at least one
/// result; throws EmptyCell otherwise. With an empty `expected`, the cells
/// are those found in the results.
GridSummary aggregate_results(const std::vector<GridResult>& results, const GridSpec* expected = nullptr);

void save_plans(const std::vector<SamplingPlan>& plans, const std::filesystem::path& path);
std::vector<SamplingPlan> load_plans(const std::filesystem::path& path);
void save_results(const std::vector<GridResult>& results, const std::filesystem::path& path);
std::vector<GridResult> load_results(const std::filesystem::path& path);
/// CSV: regime,ratio_pct,median,q1,q3,min,max
void save_summary_csv(const GridSummary& summary, const std::filesystem::path& path);

}  // namespace histoprompt
