#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "histoprompt/core/error.hpp"
#include "histoprompt/curation/image.hpp"
#include "histoprompt/curation/patch_stats.hpp"

#ifndef HISTOPROMPT_TEST_DATA
#define HISTOPROMPT_TEST_DATA "tests/data"
#endif

namespace histoprompt {
namespace {

using testing::TempDir;

RgbImage five_squares() {
    auto img = RgbImage::filled(96, 96, 255, 255, 255);
    const std::size_t corners[5][2] = {{5, 5}, {40, 8}, {70, 30}, {20, 60}, {60, 80}};
    for (const auto& c : corners) {
        for (std::size_t y = 0; y < 6; ++y) {
            for (std::size_t x = 0; x < 6; ++x) img.set(c[0] + x, c[1] + y, 0, 0, 0);
        }
    }
    return img;
}

// Noisy pink background with six dark purple nuclei.
RgbImage tissue_like(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> noise(-20, 20);
    RgbImage img = RgbImage::filled(96, 96, 0, 0, 0);
    for (std::size_t y = 0; y < 96; ++y) {
        for (std::size_t x = 0; x < 96; ++x) {
            img.set(x, y, static_cast<std::uint8_t>(225 + noise(gen)), static_cast<std::uint8_t>(150 + noise(gen)),
                    static_cast<std::uint8_t>(200 + noise(gen)));
        }
    }
    const std::size_t centres[6][2] = {{10, 10}, {50, 12}, {80, 20}, {25, 50}, {65, 60}, {40, 85}};
    for (const auto& c : centres) {
        for (std::size_t y = 0; y < 7; ++y) {
            for (std::size_t x = 0; x < 7; ++x) img.set(c[0] + x, c[1] + y, 80, 40, 120);
        }
    }
    return img;
}

// Independent reference: colorsys-style HSV, explicit mirrored Laplacian,
// within-class-variance Otsu and union-find components.
struct Reference {
    double mean_s, mean_v, std_h, std_s, std_v, lap_var;
    std::size_t shapes;
};

double pop_sd(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::size_t find(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

Reference reference_stats(const RgbImage& img) {
    const int w = static_cast<int>(img.width), h = static_cast<int>(img.height);
    std::vector<double> hs, ss, vs, gray;
    std::vector<int> inv;
    for (int i = 0; i < w * h; ++i) {
        const double r = img.pixels[3 * i] / 255.0, g = img.pixels[3 * i + 1] / 255.0, b = img.pixels[3 * i + 2] / 255.0;
        const double maxc = std::max({r, g, b}), minc = std::min({r, g, b});
        double hue = 0, sat = 0;
        if (maxc != minc) {
            sat = (maxc - minc) / maxc;
            const double rc = (maxc - r) / (maxc - minc), gc = (maxc - g) / (maxc - minc), bc = (maxc - b) / (maxc - minc);
            if (r == maxc) {
                hue = bc - gc;
            } else if (g == maxc) {
                hue = 2.0 + rc - bc;
            } else {
                hue = 4.0 + gc - rc;
            }
            hue = hue / 6.0 - std::floor(hue / 6.0);
        }
        hs.push_back(hue);
        ss.push_back(sat);
        vs.push_back(maxc);
        const double l = 0.299 * img.pixels[3 * i] + 0.587 * img.pixels[3 * i + 1] + 0.114 * img.pixels[3 * i + 2];
        gray.push_back(l / 255.0);
        inv.push_back(255 - static_cast<int>(std::lround(l)));
    }
    auto mirror = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
    std::vector<double> lap;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            lap.push_back(gray[mirror(y - 1, h) * w + x] + gray[mirror(y + 1, h) * w + x] + gray[y * w + mirror(x - 1, w)] +
                          gray[y * w + mirror(x + 1, w)] - 4 * gray[y * w + x]);
        }
    }
    const double lsd = pop_sd(lap);

    // Otsu: minimise weighted within-class variance over thresholds.
    int best_t = -1;
    double best = 1e300;
    for (int t = 0; t < 255; ++t) {
        std::vector<double> lo, hi;
        for (int v : inv) (v <= t ? lo : hi).push_back(v);
        if (lo.empty() || hi.empty()) continue;
        const double within = lo.size() * std::pow(pop_sd(lo), 2) + hi.size() * std::pow(pop_sd(hi), 2);
        if (within < best - 1e-9) {
            best = within;
            best_t = t;
        }
    }
    std::size_t shapes = 0;
    if (best_t >= 0) {
        std::vector<std::size_t> parent(static_cast<std::size_t>(w * h));
        std::iota(parent.begin(), parent.end(), 0);
        auto fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && inv[y * w + x] > best_t; };
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!fg(x, y)) continue;
                for (auto [dx, dy] : {std::pair{-1, -1}, {0, -1}, {1, -1}, {-1, 0}}) {
                    if (fg(x + dx, y + dy)) parent[find(parent, y * w + x)] = find(parent, (y + dy) * w + x + dx);
                }
            }
        }
        std::map<std::size_t, std::size_t> area;
        for (int i = 0; i < w * h; ++i) {
            if (inv[i] > best_t) ++area[find(parent, i)];
        }
        for (auto [root, a] : area) shapes += (a >= 10 && a <= 2000);
    }
    return {mean(ss), mean(vs), pop_sd(hs), pop_sd(ss), pop_sd(vs), lsd * lsd, shapes};
}

TEST(PatchStats, AllWhite) {
    const auto s = compute_patch_stats(RgbImage::filled(96, 96, 255, 255, 255));
    EXPECT_EQ(s.mean_s, 0.0);
    EXPECT_EQ(s.mean_v, 1.0);
    EXPECT_EQ(s.lap_var, 0.0);
    EXPECT_EQ(s.shape_count, 0u);
    EXPECT_EQ(classify(s, {}), RejectReason::Background);
}

TEST(PatchStats, AllBlack) {
    const auto s = compute_patch_stats(RgbImage::filled(96, 96, 0, 0, 0));
    EXPECT_EQ(s.mean_v, 0.0);
    EXPECT_EQ(s.lap_var, 0.0);
    EXPECT_EQ(classify(s, {}), RejectReason::TooDark);
}

TEST(PatchStats, UniformGrayIsLowVariation) {
    const auto s = compute_patch_stats(RgbImage::filled(96, 96, 128, 128, 128));
    EXPECT_NEAR(s.std_h, 0.0, 1e-12);
    EXPECT_NEAR(s.std_v, 0.0, 1e-12);
    EXPECT_EQ(classify(s, {}), RejectReason::LowVariation);
}

TEST(PatchStats, FiveSquaresGiveFiveShapes) {
    EXPECT_EQ(compute_patch_stats(five_squares()).shape_count, 5u);
    EXPECT_EQ(reference_stats(five_squares()).shapes, 5u);
}

TEST(PatchStats, TouchingDiagonallyIsOneShape) {
    auto img = RgbImage::filled(32, 32, 255, 255, 255);
    for (std::size_t i = 0; i < 12; ++i) img.set(4 + i, 4 + i, 0, 0, 0);
    EXPECT_EQ(compute_patch_stats(img).shape_count, 1u);
}

TEST(PatchStats, AreaBoundsFilterComponents) {
    auto img = RgbImage::filled(64, 64, 255, 255, 255);
    img.set(2, 2, 0, 0, 0);  // 1 px, below the minimum
    for (std::size_t y = 10; y < 14; ++y) {
        for (std::size_t x = 10; x < 14; ++x) img.set(x, y, 0, 0, 0);  // 16 px
    }
    EXPECT_EQ(compute_patch_stats(img).shape_count, 1u);
    EXPECT_EQ(compute_patch_stats(img, 1, 10).shape_count, 1u);
    EXPECT_EQ(compute_patch_stats(img, 1, 20).shape_count, 2u);
}

TEST(PatchStats, TissueFixtureMatchesReferenceAndIsAccepted) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto img = tissue_like(seed);
        const auto s = compute_patch_stats(img);
        const auto r = reference_stats(img);
        EXPECT_NEAR(s.mean_s, r.mean_s, 1e-12);
        EXPECT_NEAR(s.mean_v, r.mean_v, 1e-12);
        EXPECT_NEAR(s.std_h, r.std_h, 1e-12);
        EXPECT_NEAR(s.std_s, r.std_s, 1e-12);
        EXPECT_NEAR(s.std_v, r.std_v, 1e-12);
        EXPECT_NEAR(s.lap_var, r.lap_var, 1e-12);
        EXPECT_EQ(s.shape_count, r.shapes);
        EXPECT_EQ(s.shape_count, 6u);

        // The five checks, evaluated independently against the defaults.
        const CurationThresholds t;
        EXPECT_FALSE(r.mean_v > t.max_mean_v_background && r.mean_s < t.max_mean_s_background);
        EXPECT_GE(r.mean_v, t.min_mean_v_dark);
        EXPECT_GE(std::min({r.std_h, r.std_s, r.std_v}), t.min_std_hsv);
        EXPECT_GE(r.lap_var, t.min_lap_var);
        EXPECT_GE(r.shapes, t.min_shape_count);
        EXPECT_EQ(classify(s, t), RejectReason::None);
    }
}

TEST(PatchStats, FirstFailingCheckWins) {
    PatchStats s;
    s.mean_v = 0.05;  // dark, and also low variation and blurry
    EXPECT_EQ(classify(s, {}), RejectReason::TooDark);
    s = {0.3, 0.8, 0.1, 0.1, 0.1, 0.0001, 0};
    EXPECT_EQ(classify(s, {}), RejectReason::Blurry);
    s.lap_var = 1.0;
    EXPECT_EQ(classify(s, {}), RejectReason::TooFewShapes);
    s.shape_count = 5;
    EXPECT_EQ(classify(s, {}), RejectReason::None);
}

TEST(PatchStats, RejectsEmptyImage) {
    EXPECT_THROW(compute_patch_stats(RgbImage{}), Error);
}

TEST(Thresholds, ValidatesBounds) {
    CurationThresholds t;
    t.shape_area_min_px = 2000;
    EXPECT_THROW(t.check(), Error);
    t = {};
    t.min_lap_var = -1;
    EXPECT_THROW(t.check(), Error);
}

TEST(Image, DecodesPngAndJpegFixtures) {
    const auto png = read_image(std::filesystem::path(HISTOPROMPT_TEST_DATA) / "solid_8x6.png");
    ASSERT_EQ(png.width, 8u);
    ASSERT_EQ(png.height, 6u);
    EXPECT_EQ(png.pixels[0], 200);
    EXPECT_EQ(png.pixels[1], 40);
    EXPECT_EQ(png.pixels[2], 90);
    const auto jpg = read_image(std::filesystem::path(HISTOPROMPT_TEST_DATA) / "solid_8x6.jpg");
    ASSERT_EQ(jpg.width, 8u);
    ASSERT_EQ(jpg.height, 6u);
    EXPECT_NEAR(jpg.pixels[0], 200, 4);
    EXPECT_NEAR(jpg.pixels[1], 40, 4);
    EXPECT_NEAR(jpg.pixels[2], 90, 4);
}

TEST(Image, PngRoundTripAndResize) {
    TempDir dir;
    const auto img = tissue_like(9);
    write_png(img, dir / "t.png");
    const auto back = read_image(dir / "t.png");
    EXPECT_EQ(back.pixels, img.pixels);

    const auto up = resize_bilinear(RgbImage::filled(4, 4, 10, 20, 30), 512, 512);
    ASSERT_EQ(up.width, 512u);
    EXPECT_EQ(up.pixels[3 * 1000], 10);
    EXPECT_EQ(up.pixels[3 * 1000 + 2], 30);
}

TEST(Curate, ReportsEveryFileInPathOrder) {
    TempDir dir;
    std::filesystem::create_directories(dir / "healthy");
    std::filesystem::create_directories(dir / "cancer");
    write_png(RgbImage::filled(96, 96, 255, 255, 255), dir / "healthy/b_white.png");
    write_png(tissue_like(4), dir / "healthy/a_tissue.png");
    write_png(RgbImage::filled(96, 96, 128, 128, 128), dir / "cancer/gray.png");
    write_png(tissue_like(5), dir / "cancer/tissue.png");
    std::ofstream(dir / "cancer/broken.png") << "not an image";

    const auto result = curate(dir.path(), {});
    const auto& p = result.report.patches;
    ASSERT_EQ(p.size(), 5u);
    EXPECT_EQ(result.report.accepted_count() + result.report.rejected_count(), 5u);
    EXPECT_TRUE(std::is_sorted(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.path < b.path; }));
    std::map<std::string, RejectReason> reasons;
    for (const auto& x : p) reasons[x.path] = x.reason;
    EXPECT_EQ(reasons["cancer/broken.png"], RejectReason::DecodeError);
    EXPECT_EQ(reasons["cancer/gray.png"], RejectReason::LowVariation);
    EXPECT_EQ(reasons["healthy/b_white.png"], RejectReason::Background);
    EXPECT_EQ(reasons["healthy/a_tissue.png"], RejectReason::None);

    ASSERT_EQ(result.manifest.records.size(), 2u);
    EXPECT_EQ(result.manifest.records[0].id, "cancer/tissue");
    EXPECT_EQ(result.manifest.records[0].label, "cancer");
    EXPECT_EQ(result.manifest.records[1].label, "healthy");

    // Pure function of the bytes.
    EXPECT_EQ(curate(dir.path(), {}).report.patches[1].stats, p[1].stats);
}

}  // namespace
}  // namespace histoprompt
