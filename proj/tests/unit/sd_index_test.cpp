#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "histoprompt/core/error.hpp"
#include "histoprompt/morphology/sd_index.hpp"

namespace histoprompt {
namespace {

ClusterModel model_with(std::vector<std::vector<double>> centroids) {
    ClusterModel m;
    m.k = centroids.size();
    m.centroids = Matrix(m.k, centroids[0].size());
    for (std::size_t i = 0; i < m.k; ++i) {
        for (std::size_t j = 0; j < centroids[i].size(); ++j) m.centroids(i, j) = centroids[i][j];
    }
    return m;
}

Matrix rows(std::vector<std::vector<double>> v) {
    Matrix m(v.size(), v[0].size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < v[i].size(); ++j) m(i, j) = v[i][j];
    }
    return m;
}

TEST(SDIndex, TwoCentroidsAtDistanceThree) {
    const auto data = rows({{0, 0}, {0, 0}, {3, 0}, {3, 0}});
    const auto t = sd_terms(data, model_with({{0, 0}, {3, 0}}));
    EXPECT_DOUBLE_EQ(t.dis, 2.0 / 3.0);
    EXPECT_EQ(t.scat, 0.0);
}

TEST(SDIndex, HandComputedScatAndDis) {
    // Cluster A: (0,0),(2,0)  var=(1,0)   Cluster B: (10,0),(10,4)  var=(0,4)
    // X: mean (5.5,1), var=((30.25+12.25+20.25+20.25)/4, (1+1+1+9)/4) = (20.75, 3)
    const auto data = rows({{0, 0}, {2, 0}, {10, 0}, {10, 4}});
    const auto model = model_with({{1, 0}, {10, 2}});
    const auto t = sd_terms(data, model);
    const double scat = (1.0 + 4.0) / 2.0 / std::hypot(20.75, 3.0);
    const double dist = std::hypot(9.0, 2.0);
    EXPECT_NEAR(t.scat, scat, 1e-15);
    EXPECT_NEAR(t.dis, 2.0 / dist, 1e-15);
    const auto v = sd_index(data, model, 0.5);
    EXPECT_NEAR(v.sd, 0.5 * v.scat + v.dis, 1e-15);
}

TEST(SDIndex, ThreeCentroidsUsesRatioOfExtremes) {
    // Centroids on a line at 0, 1, 3: distances 1, 3, 2.
    const auto data = rows({{0}, {1}, {3}});
    const auto t = sd_terms(data, model_with({{0}, {1}, {3}}));
    const double expected = (3.0 / 1.0) * (1.0 / (1 + 3) + 1.0 / (1 + 2) + 1.0 / (3 + 2));
    EXPECT_NEAR(t.dis, expected, 1e-15);
}

TEST(SDIndex, DegenerateInputs) {
    const auto same = rows({{1, 1}, {1, 1}, {1, 1}});
    try {
        sd_terms(same, model_with({{1, 1}, {2, 2}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateData);
    }
    const auto data = rows({{0, 0}, {1, 1}});
    try {
        sd_terms(data, model_with({{0, 0}, {0, 0}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CoincidentCentroids);
    }
}

TEST(SelectK, ReportIsConsistentAndDeterministic) {
    const auto b = testing::make_separated_blobs(400, 8, 5, 0.1, 5.0, 21);
    const auto s1 = select_k(b.data, 2, 8, 5);
    const auto s2 = select_k(b.data, 2, 8, 5);
    ASSERT_EQ(s1.report.per_k.size(), 7u);
    EXPECT_EQ(s1.report.alpha, s1.report.per_k.back().dis);
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < s1.report.per_k.size(); ++i) {
        const auto& r = s1.report.per_k[i];
        EXPECT_EQ(r.k, 2 + i);
        EXPECT_GE(r.scat, 0.0);
        EXPECT_GT(r.dis, 0.0);
        EXPECT_DOUBLE_EQ(r.sd, s1.report.alpha * r.scat + r.dis);
        if (r.sd < s1.report.per_k[argmin].sd) argmin = i;
        EXPECT_EQ(r.sd, s2.report.per_k[i].sd);
    }
    EXPECT_EQ(s1.report.chosen_k, s1.report.per_k[argmin].k);
    EXPECT_EQ(s1.model.k, s1.report.chosen_k);
    EXPECT_EQ(s1.report.chosen_k, 5u);
}

TEST(SelectK, RejectsBadSweep) {
    const auto b = testing::make_blobs(10, 2, 2, 1.0, 1);
    EXPECT_THROW(select_k(b.data, 1, 5, 0), Error);
    EXPECT_THROW(select_k(b.data, 6, 5, 0), Error);
    EXPECT_THROW(select_k(b.data, 2, 11, 0), Error);
    EXPECT_EQ(kDefaultSweepMin, 2u);
    EXPECT_EQ(kDefaultSweepMax, 50u);
}

TEST(SelectK, CsvReport) {
    testing::TempDir dir;
    SDIndexReport r;
    r.per_k = {{2, 0.5, 1.0, 1.25}, {3, 0.25, 2.0, 2.125}};
    save_sd_report(r, dir / "sd.csv");
    std::ifstream in(dir / "sd.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    EXPECT_EQ(header, "k,scat,dis,sd");
    EXPECT_EQ(first, "2,0.5,1,1.25");
}

}  // namespace
}  // namespace histoprompt
