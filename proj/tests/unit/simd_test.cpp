#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "histoprompt/simd/kernels.hpp"

namespace histoprompt::simd {
namespace {

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
    std::normal_distribution<double> dist(0.0, 3.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(gen);
    return v;
}

class BackendEquivalence : public ::testing::TestWithParam<Backend> {};

TEST_P(BackendEquivalence, AgreesWithScalarReference) {
    const auto& ref = scalar_kernels();
    const auto& k = kernels_for(GetParam());
    std::mt19937_64 gen(42);
    for (std::size_t n = 0; n < 70; ++n) {
        const auto a = random_vector(gen, n);
        const auto b = random_vector(gen, n);
        double mag_l2 = 0.0, mag_dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mag_l2 += (a[i] - b[i]) * (a[i] - b[i]);
            mag_dot += std::abs(a[i] * b[i]);
        }
        EXPECT_NEAR(k.squared_l2(a.data(), b.data(), n), ref.squared_l2(a.data(), b.data(), n), 1e-13 * (1 + mag_l2))
            << "n=" << n;
        EXPECT_NEAR(k.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-13 * (1 + mag_dot)) << "n=" << n;

        auto y1 = b, y2 = b;
        k.axpy(0.75, a.data(), y1.data(), n);
        ref.axpy(0.75, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-14 * (1 + std::abs(y2[i])));
    }
}

TEST_P(BackendEquivalence, SquaredDistanceIsExactlySymmetric) {
    const auto& k = kernels_for(GetParam());
    std::mt19937_64 gen(3);
    for (std::size_t n = 1; n < 40; ++n) {
        const auto a = random_vector(gen, n);
        const auto b = random_vector(gen, n);
        EXPECT_EQ(k.squared_l2(a.data(), b.data(), n), k.squared_l2(b.data(), a.data(), n));
        EXPECT_EQ(k.squared_l2(a.data(), a.data(), n), 0.0);
    }
}

INSTANTIATE_TEST_SUITE_P(Available, BackendEquivalence, ::testing::ValuesIn(available_backends()),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Dispatch, ScalarAlwaysAvailableAndActiveIsListed) {
    const auto backends = available_backends();
    ASSERT_FALSE(backends.empty());
    EXPECT_EQ(backends.front(), Backend::Scalar);
    EXPECT_NE(std::find(backends.begin(), backends.end(), active().backend), backends.end());
}

TEST(Dispatch, SmallKnownValues) {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
    EXPECT_DOUBLE_EQ(squared_l2(a, b), 16 + 4 + 0 + 4 + 16);
    EXPECT_DOUBLE_EQ(dot(a, b), 5 + 8 + 9 + 8 + 5);
}

}  // namespace
}  // namespace histoprompt::simd
