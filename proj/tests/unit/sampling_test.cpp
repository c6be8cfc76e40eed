#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "histoprompt/core/error.hpp"
#include "histoprompt/morphology/prompts.hpp"
#include "histoprompt/sampling/balance.hpp"
#include "histoprompt/sampling/grid.hpp"

namespace histoprompt {
namespace {

// 22 prompts per label; prompt c of a label holds base + 7*c + offset records.
DatasetManifest prompt_manifest(std::size_t base) {
    DatasetManifest m;
    for (const char* label : {"healthy", "cancer"}) {
        const std::size_t offset = std::string(label) == "cancer" ? 3 : 0;
        for (int c = 0; c < 22; ++c) {
            const auto text = build_prompt(label, c, PromptStyle::Enriched).text;
            const std::size_t pop = base + 7 * static_cast<std::size_t>(c) + offset;
            for (std::size_t i = 0; i < pop; ++i) {
                m.records.push_back({std::string(label) + "-" + std::to_string(c) + "-" + std::to_string(i), label, {}, c, text});
            }
        }
    }
    // Interleave so record order does not mirror prompt order.
    std::mt19937_64 gen(1);
    std::shuffle(m.records.begin(), m.records.end(), gen);
    return m;
}

std::map<std::string, std::size_t> per_prompt(const DatasetManifest& m) {
    std::map<std::string, std::size_t> out;
    for (const auto& r : m.records) ++out[*r.prompt];
    return out;
}

TEST(Balance, FortyTwoPromptsFiftyOneThousand) {
    const auto m = prompt_manifest(1300);
    const auto b = balance(m, 21, 51000, 7);
    const auto counts = per_prompt(b.manifest);
    ASSERT_EQ(counts.size(), 42u);
    std::size_t at_1214 = 0, at_1215 = 0, sum = 0;
    for (auto [p, n] : counts) {
        at_1214 += n == 1214;
        at_1215 += n == 1215;
        sum += n;
        EXPECT_EQ(b.per_prompt_quota.at(p), n);
    }
    EXPECT_EQ(at_1214, 30u);
    EXPECT_EQ(at_1215, 12u);
    EXPECT_EQ(sum, 51000u);
    EXPECT_EQ(b.total(), 51000u);

    // Least populated prompt (index 0) is dropped for each label.
    EXPECT_FALSE(counts.contains(build_prompt("healthy", 0, PromptStyle::Enriched).text));
    EXPECT_FALSE(counts.contains(build_prompt("cancer", 0, PromptStyle::Enriched).text));
    // The +1 goes to the most populated prompts: cancer 21..16 and healthy 21..16.
    for (int c = 16; c < 22; ++c) {
        EXPECT_EQ(counts.at(build_prompt("cancer", c, PromptStyle::Enriched).text), 1215u) << c;
        EXPECT_EQ(counts.at(build_prompt("healthy", c, PromptStyle::Enriched).text), 1215u) << c;
    }

    std::set<std::string> ids;
    for (const auto& r : b.manifest.records) ids.insert(r.id);
    EXPECT_EQ(ids.size(), 51000u);

    const auto again = balance(m, 21, 51000, 7);
    EXPECT_EQ(again.manifest.records, b.manifest.records);
    EXPECT_NE(balance(m, 21, 51000, 8).manifest.records, b.manifest.records);
}

TEST(Balance, SmallCasesAndErrors) {
    DatasetManifest m;
    for (int i = 0; i < 3; ++i) m.records.push_back({"a" + std::to_string(i), "x", {}, 0, "p0"});
    for (int i = 0; i < 2; ++i) m.records.push_back({"b" + std::to_string(i), "x", {}, 1, "p1"});
    const auto b = balance(m, 2, 4, 1);
    EXPECT_EQ(per_prompt(b.manifest), (std::map<std::string, std::size_t>{{"p0", 2}, {"p1", 2}}));

    try {
        balance(m, 2, 5, 1);  // quotas 3 (p0) and 2 (p1) fit exactly
        balance(m, 2, 6, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientExamples);
        EXPECT_NE(std::string(e.what()).find("p"), std::string::npos);
    }
    try {
        balance(m, 3, 3, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientPrompts);
    }
}

TEST(Balance, UniformQuotas) {
    const auto q = uniform_quotas(42, 51000);
    EXPECT_EQ(std::count(q.begin(), q.end(), 1215u), 12);
    EXPECT_EQ(std::count(q.begin(), q.end(), 1214u), 30);
    EXPECT_EQ(uniform_quotas(2, 4), (std::vector<std::size_t>{2, 2}));
}

TEST(Split, FiftyThousandAndOneThousand) {
    const auto b = balance(prompt_manifest(1300), 21, 51000, 7);
    const auto [train, val] = split(b, 50000, 1000, 3);
    ASSERT_EQ(train.records.size(), 50000u);
    ASSERT_EQ(val.records.size(), 1000u);
    const auto vc = per_prompt(val);
    const auto tc = per_prompt(train);
    const auto bc = per_prompt(b.manifest);
    ASSERT_EQ(vc.size(), 42u);
    std::size_t v23 = 0, v24 = 0;
    for (auto [p, n] : vc) {
        EXPECT_TRUE(n == 23 || n == 24) << p << " " << n;
        v23 += n == 23;
        v24 += n == 24;
        EXPECT_EQ(n + tc.at(p), bc.at(p));
    }
    // 1000 = 42*23 + 34
    EXPECT_EQ(v24, 34u);
    EXPECT_EQ(v23, 8u);

    std::set<std::string> a, c;
    for (const auto& r : train.records) a.insert(r.id);
    for (const auto& r : val.records) c.insert(r.id);
    for (const auto& id : c) EXPECT_FALSE(a.contains(id));
    EXPECT_EQ(a.size() + c.size(), 51000u);
}

TEST(Split, EdgeCases) {
    const auto b = balance(prompt_manifest(60), 21, 2100, 1);
    const auto [train, val] = split(b, 2100, 0, 1);
    EXPECT_EQ(train.records.size(), 2100u);
    EXPECT_TRUE(val.records.empty());
    try {
        split(b, 2000, 99, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CountMismatch);
    }
}

DatasetManifest pool(const std::string& prefix, std::size_t per_label) {
    DatasetManifest m;
    for (const char* label : {"cancer", "healthy"}) {
        for (std::size_t i = 0; i < per_label; ++i) m.records.push_back({prefix + label + std::to_string(i), label, {}, {}, {}});
    }
    return m;
}

TEST(Grid, DefaultDesign) {
    const auto real = pool("r", 5000);
    const auto synth = pool("s", 15000);
    GridSpec spec;
    spec.seed = 11;
    const auto plans = make_grid(spec, real, synth);
    ASSERT_EQ(plans.size(), 420u);
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> keys;
    for (const auto& p : plans) {
        keys.insert({p.regime, p.ratio_pct, p.fold});
        ASSERT_EQ(p.real_ids.size(), p.regime);
        ASSERT_EQ(p.synthetic_ids.size(), (p.regime * p.ratio_pct + 50) / 100);
        ASSERT_EQ(std::set<std::string>(p.real_ids.begin(), p.real_ids.end()).size(), p.real_ids.size());
        ASSERT_EQ(std::set<std::string>(p.synthetic_ids.begin(), p.synthetic_ids.end()).size(), p.synthetic_ids.size());
        if (p.regime == 100 && p.ratio_pct == 200) EXPECT_EQ(p.synthetic_ids.size(), 200u);
        if (p.ratio_pct == 0) EXPECT_TRUE(p.synthetic_ids.empty());
        const auto cancer = std::count_if(p.real_ids.begin(), p.real_ids.end(), [](const auto& id) { return id[1] == 'c'; });
        EXPECT_EQ(static_cast<std::size_t>(cancer), (p.regime + 1) / 2);
    }
    EXPECT_EQ(keys.size(), 420u);
    EXPECT_EQ(synthetic_count(100, 200), 200u);
    EXPECT_EQ(synthetic_count(10, 25), 3u);  // 2.5 rounds half away from zero
}

TEST(Grid, ReproducibleAndFoldsDiffer) {
    GridSpec spec;
    spec.regimes = {50};
    spec.ratios_pct = {100};
    spec.folds = 3;
    spec.seed = 4;
    const auto real = pool("r", 200), synth = pool("s", 200);
    const auto a = make_grid(spec, real, synth), b = make_grid(spec, real, synth);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].real_ids, b[i].real_ids);
        EXPECT_EQ(a[i].synthetic_ids, b[i].synthetic_ids);
    }
    EXPECT_NE(a[0].real_ids, a[1].real_ids);
}

TEST(Grid, InsufficientData) {
    GridSpec spec;
    spec.regimes = {100};
    spec.ratios_pct = {300};
    spec.folds = 1;
    try {
        make_grid(spec, pool("r", 100), pool("s", 100));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
    }
}

TEST(Grid, PlansRoundTrip) {
    testing::TempDir dir;
    GridSpec spec;
    spec.regimes = {10, 25};
    spec.ratios_pct = {0, 50};
    spec.folds = 2;
    const auto plans = make_grid(spec, pool("r", 30), pool("s", 30));
    save_plans(plans, dir / "plans.jsonl");
    const auto back = load_plans(dir / "plans.jsonl");
    ASSERT_EQ(back.size(), plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
        EXPECT_EQ(back[i].seed, plans[i].seed);
        EXPECT_EQ(back[i].real_ids, plans[i].real_ids);
        EXPECT_EQ(back[i].synthetic_ids, plans[i].synthetic_ids);
    }
}

TEST(Aggregate, MedianAndMissingCell) {
    const auto s = aggregate_results({{10, 0, 0, 0.8}, {10, 0, 1, 1.0}, {10, 0, 2, 0.9}});
    ASSERT_EQ(s.cells.size(), 1u);
    EXPECT_DOUBLE_EQ(s.cells[0].median, 0.9);
    EXPECT_DOUBLE_EQ(aggregate_results({{1, 0, 0, 0.2}, {1, 0, 1, 0.4}}).cells[0].median, 0.3);

    GridSpec spec;
    spec.regimes = {10};
    spec.ratios_pct = {0, 25};
    try {
        aggregate_results({{10, 0, 0, 0.8}}, &spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyCell);
        EXPECT_NE(std::string(e.what()).find("25"), std::string::npos);
    }
}

TEST(Aggregate, MatchesSortAndIndexOracle) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.5, 1.0);
    std::vector<GridResult> results;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cells;
    for (std::size_t regime : {10, 100}) {
        for (std::size_t ratio : {0, 50, 300}) {
            for (std::size_t f = 0; f < 10; ++f) {
                const double a = u(gen);
                results.push_back({regime, ratio, f, a});
                cells[{regime, ratio}].push_back(a);
            }
        }
    }
    std::shuffle(results.begin(), results.end(), gen);
    const auto s = aggregate_results(results);
    ASSERT_EQ(s.cells.size(), 6u);
    for (const auto& c : s.cells) {
        auto v = cells[{c.regime, c.ratio_pct}];
        std::sort(v.begin(), v.end());
        // n = 10: median at 4.5, quartiles at 2.25 and 6.75.
        EXPECT_DOUBLE_EQ(c.median, (v[4] + v[5]) / 2);
        EXPECT_DOUBLE_EQ(c.q1, v[2] + 0.25 * (v[3] - v[2]));
        EXPECT_DOUBLE_EQ(c.q3, v[6] + 0.75 * (v[7] - v[6]));
        EXPECT_EQ(c.min, v[0]);
        EXPECT_EQ(c.max, v[9]);
        EXPECT_EQ(c.count, 10u);
    }
}

}  // namespace
}  // namespace histoprompt
