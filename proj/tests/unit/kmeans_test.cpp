#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "histoprompt/core/error.hpp"
#include "histoprompt/morphology/kmeans.hpp"

namespace histoprompt {
namespace {

using testing::make_blobs;
using testing::sq_dist;
using testing::TempDir;

// Five blobs at 6·e_k in d=8 (pairwise distance ~8.5), sigma 0.1.
testing::Blobs axis_blobs(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 0.1);
    testing::Blobs b{Matrix(n, 8), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const int k = static_cast<int>(i % 5);
        b.truth[i] = k;
        for (std::size_t j = 0; j < 8; ++j) b.data(i, j) = (j == static_cast<std::size_t>(k) ? 6.0 : 0.0) + noise(gen);
    }
    return b;
}

TEST(KMeans, TwoPointsTwoClusters) {
    Matrix m(2, 3);
    m(0, 0) = 1;
    m(1, 2) = -4;
    const auto model = kmeans_fit(m, 2, 1);
    EXPECT_EQ(model.inertia, 0.0);
    std::set<std::vector<double>> got, want{{1, 0, 0}, {0, 0, -4}};
    for (std::size_t c = 0; c < 2; ++c) got.insert({model.centroids.row(c).begin(), model.centroids.row(c).end()});
    EXPECT_EQ(got, want);
}

TEST(KMeans, SingleClusterIsColumnMean) {
    const auto b = make_blobs(37, 4, 3, 1.0, 2);
    const auto model = kmeans_fit(b.data, 1, 9);
    for (std::size_t j = 0; j < 4; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < 37; ++i) s += b.data(i, j);
        EXPECT_NEAR(model.centroids(0, j), s / 37, 1e-12);
    }
}

TEST(KMeans, RecoversBlobIdentityUpToPermutation) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto b = axis_blobs(500, 100 + seed);
        const auto model = kmeans_fit(b.data, 5, seed);
        const auto labels = assign(model, b.data);
        std::map<int, int> blob_to_cluster;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            auto [it, fresh] = blob_to_cluster.emplace(b.truth[i], labels[i]);
            correct += it->second == labels[i];
        }
        std::set<int> image;
        for (auto [blob, c] : blob_to_cluster) image.insert(c);
        EXPECT_EQ(image.size(), 5u) << "seed " << seed;
        EXPECT_EQ(correct, labels.size()) << "seed " << seed;
    }
}

TEST(KMeans, DeterministicGivenSeed) {
    const auto b = make_blobs(300, 6, 4, 2.0, 5);
    const auto a1 = kmeans_fit(b.data, 4, 77);
    const auto a2 = kmeans_fit(b.data, 4, 77);
    EXPECT_EQ(a1.inertia, a2.inertia);
    EXPECT_EQ(std::vector<double>(a1.centroids.data(), a1.centroids.data() + 24),
              std::vector<double>(a2.centroids.data(), a2.centroids.data() + 24));
}

TEST(KMeans, InertiaNeverIncreasesAndMatchesAssignment) {
    const auto b = make_blobs(400, 5, 6, 4.0, 8);
    const auto model = kmeans_fit(b.data, 6, 3);
    ASSERT_FALSE(model.inertia_trace.empty());
    for (std::size_t i = 1; i < model.inertia_trace.size(); ++i) {
        EXPECT_LE(model.inertia_trace[i], model.inertia_trace[i - 1] * (1 + 1e-12));
    }
    const auto labels = assign(model, b.data);
    double inertia = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        inertia += sq_dist(b.data.row(i), model.centroids.row(static_cast<std::size_t>(labels[i])));
    }
    EXPECT_NEAR(model.inertia, inertia, 1e-9 * inertia);
    EXPECT_LE(model.iterations, 300u);
}

TEST(KMeans, DuplicatePointsDoNotLeaveEmptyClusters) {
    Matrix m(10, 2);
    for (std::size_t i = 0; i < 10; ++i) m(i, 0) = i < 8 ? 0.0 : 5.0 + static_cast<double>(i);
    const auto model = kmeans_fit(m, 3, 4);
    const auto labels = assign(model, m);
    EXPECT_EQ(std::set<int>(labels.begin(), labels.end()).size(), 3u);
}

TEST(KMeans, TooFewPoints) {
    Matrix m(3, 2);
    try {
        kmeans_fit(m, 4, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
    }
}

TEST(Assign, MatchesBruteForceScanWithLowestIndexTies) {
    std::mt19937_64 gen(12);
    std::uniform_int_distribution<int> grid(-3, 3);  // integer lattice makes ties common
    ClusterModel model;
    model.k = 7;
    model.centroids = Matrix(7, 3);
    for (std::size_t c = 0; c < 7; ++c) {
        for (std::size_t j = 0; j < 3; ++j) model.centroids(c, j) = grid(gen);
    }
    Matrix pts(2000, 3);
    for (std::size_t i = 0; i < 2000; ++i) {
        for (std::size_t j = 0; j < 3; ++j) pts(i, j) = grid(gen) * 0.5;
    }
    const auto labels = assign(model, pts);
    for (std::size_t i = 0; i < 2000; ++i) {
        int best = 0;
        double best_d = sq_dist(pts.row(i), model.centroids.row(0));
        for (std::size_t c = 1; c < 7; ++c) {
            const double d = sq_dist(pts.row(i), model.centroids.row(c));
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        ASSERT_EQ(labels[i], best) << "row " << i;
    }
}

TEST(Assign, ExactCentroidAndEquidistantPoint) {
    ClusterModel model;
    model.k = 4;
    model.centroids = Matrix(4, 1);
    model.centroids(0, 0) = -10;
    model.centroids(1, 0) = 0;
    model.centroids(2, 0) = 2;
    model.centroids(3, 0) = 7;
    Matrix q(2, 1);
    q(0, 0) = 7;
    q(1, 0) = 1;
    const auto labels = assign(model, q);
    EXPECT_EQ(labels[0], 3);
    EXPECT_EQ(labels[1], 1);

    Matrix wrong(1, 2);
    EXPECT_THROW(assign(model, wrong), Error);
}

TEST(ClusterModelIo, RoundTripIsExact) {
    TempDir dir;
    const auto b = make_blobs(100, 5, 3, 1.0, 1);
    const auto model = kmeans_fit(b.data, 3, 42);
    save_cluster_model(model, dir / "m.json");
    const auto back = load_cluster_model(dir / "m.json");
    EXPECT_EQ(back.k, 3u);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.inertia, model.inertia);
    for (std::size_t i = 0; i < 15; ++i) EXPECT_EQ(back.centroids.data()[i], model.centroids.data()[i]);
}

}  // namespace
}  // namespace histoprompt
