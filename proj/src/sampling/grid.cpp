#include "histoprompt/sampling/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "histoprompt/core/error.hpp"
#include "histoprompt/core/random.hpp"

namespace histoprompt {

namespace {

struct Pool {
    std::vector<std::string> ids;
    std::map<std::string, std::vector<std::string>> by_label;
};

Pool make_pool(const DatasetManifest& m) {
    Pool p;
    for (const auto& r : m.records) {
        p.ids.push_back(r.id);
        p.by_label[r.label].push_back(r.id);
    }
    return p;
}

// Even split across labels when every label can supply its share,
// otherwise a plain draw from the whole pool.
std::vector<std::string> draw(const Pool& pool, std::size_t count, Rng& rng, const char* what) {
    if (count > pool.ids.size()) {
        throw Error(ErrorCode::InsufficientData, std::string(what) + " pool has " + std::to_string(pool.ids.size()) +
                                                     " records, plan needs " + std::to_string(count));
    }
    std::vector<std::string> out;
    out.reserve(count);
    const std::size_t labels = pool.by_label.size();
    bool stratify = labels >= 2;
    std::vector<std::size_t> share(labels, 0);
    if (stratify) {
        std::size_t i = 0;
        for (const auto& [label, ids] : pool.by_label) {
            share[i] = count / labels + (i < count % labels ? 1 : 0);
            if (share[i] > ids.size()) stratify = false;
            ++i;
        }
    }
    if (stratify) {
        std::size_t i = 0;
        for (const auto& [label, ids] : pool.by_label) {
            for (auto pick : rng.sample_indices(ids.size(), share[i])) out.push_back(ids[pick]);
            ++i;
        }
    } else {
        for (auto pick : rng.sample_indices(pool.ids.size(), count)) out.push_back(pool.ids[pick]);
    }
    return out;
}

}  // namespace

std::size_t synthetic_count(std::size_t regime, std::size_t ratio_pct) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(regime) * static_cast<double>(ratio_pct) / 100.0));
}

std::vector<SamplingPlan> make_grid(const GridSpec& spec, const DatasetManifest& real, const DatasetManifest& synth) {
    const Pool real_pool = make_pool(real);
    const Pool synth_pool = make_pool(synth);
    std::vector<SamplingPlan> plans;
    plans.reserve(spec.regimes.size() * spec.ratios_pct.size() * spec.folds);
    for (auto regime : spec.regimes) {
        for (auto ratio : spec.ratios_pct) {
            for (std::size_t fold = 0; fold < spec.folds; ++fold) {
                SamplingPlan plan;
                plan.regime = regime;
                plan.ratio_pct = ratio;
                plan.fold = fold;
                plan.seed = derive_seed(spec.seed, regime, ratio, fold);
                Rng rng(plan.seed);
                plan.real_ids = draw(real_pool, regime, rng, "real");
                plan.synthetic_ids = draw(synth_pool, synthetic_count(regime, ratio), rng, "synthetic");
                plans.push_back(std::move(plan));
            }
        }
    }
    return plans;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::EmptyInput, "quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

GridSummary aggregate_results(const std::vector<GridResult>& results, const GridSpec* expected) {
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cells;
    for (const auto& r : results) {
        if (!(r.auc >= 0.0 && r.auc <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "AUC outside [0, 1] for regime " + std::to_string(r.regime) +
                                                        ", ratio " + std::to_string(r.ratio_pct));
        }
        cells[{r.regime, r.ratio_pct}].push_back(r.auc);
    }
    if (expected) {
        for (auto regime : expected->regimes) {
            for (auto ratio : expected->ratios_pct) {
                if (!cells.contains({regime, ratio})) {
                    throw Error(ErrorCode::EmptyCell, "no results for regime " + std::to_string(regime) + ", ratio " +
                                                          std::to_string(ratio) + "%");
                }
            }
        }
    }
    GridSummary summary;
    for (auto& [key, values] : cells) {
        std::sort(values.begin(), values.end());
        CellSummary c;
        c.regime = key.first;
        c.ratio_pct = key.second;
        c.count = values.size();
        c.median = quantile_sorted(values, 0.5);
        c.q1 = quantile_sorted(values, 0.25);
        c.q3 = quantile_sorted(values, 0.75);
        c.min = values.front();
        c.max = values.back();
        summary.cells.push_back(c);
    }
    return summary;
}

void save_plans(const std::vector<SamplingPlan>& plans, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    for (const auto& p : plans) {
        out << nlohmann::json{{"regime", p.regime},     {"ratio_pct", p.ratio_pct}, {"fold", p.fold},
                              {"seed", p.seed},         {"real_ids", p.real_ids},   {"synthetic_ids", p.synthetic_ids}}
                   .dump()
            << '\n';
    }
}

namespace {

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            fn(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
}

}  // namespace

std::vector<SamplingPlan> load_plans(const std::filesystem::path& path) {
    std::vector<SamplingPlan> plans;
    for_each_json_line(path, [&](const nlohmann::json& j) {
        SamplingPlan p;
        p.regime = j.at("regime").get<std::size_t>();
        p.ratio_pct = j.at("ratio_pct").get<std::size_t>();
        p.fold = j.at("fold").get<std::size_t>();
        p.seed = j.at("seed").get<std::uint64_t>();
        p.real_ids = j.at("real_ids").get<std::vector<std::string>>();
        p.synthetic_ids = j.at("synthetic_ids").get<std::vector<std::string>>();
        plans.push_back(std::move(p));
    });
    return plans;
}

void save_results(const std::vector<GridResult>& results, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    for (const auto& r : results) {
        out << nlohmann::json{{"regime", r.regime}, {"ratio_pct", r.ratio_pct}, {"fold", r.fold}, {"auc", r.auc}}.dump()
            << '\n';
    }
}

std::vector<GridResult> load_results(const std::filesystem::path& path) {
    std::vector<GridResult> results;
    for_each_json_line(path, [&](const nlohmann::json& j) {
        results.push_back({j.at("regime").get<std::size_t>(), j.at("ratio_pct").get<std::size_t>(),
                           j.value("fold", std::size_t{0}), j.at("auc").get<double>()});
    });
    return results;
}

void save_summary_csv(const GridSummary& summary, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << "regime,ratio_pct,median,q1,q3,min,max\n";
    char buf[256];
    for (const auto& c : summary.cells) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", c.regime, c.ratio_pct, c.median, c.q1, c.q3,
                      c.min, c.max);
        out << buf;
    }
}

}  // namespace histoprompt
