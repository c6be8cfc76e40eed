#include "histoprompt/curation/patch_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "histoprompt/core/error.hpp"
#include "histoprompt/core/parallel.hpp"

namespace histoprompt {

namespace {

struct Hsv {
    double h, s, v;
};

// Standard hexcone conversion, every channel in [0, 1].
Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0.0) {
        if (mx == r) {
            h = std::fmod((g - b) / delta, 6.0);
            if (h < 0.0) h += 6.0;
        } else if (mx == g) {
            h = (b - r) / delta + 2.0;
        } else {
            h = (r - g) / delta + 4.0;
        }
        h /= 6.0;
    }
    const double s = mx > 0.0 ? delta / mx : 0.0;
    return {h, s, mx};
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

// Two-pass population moments.
MeanSd mean_sd(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / n)};
}

// Index into [0, n) mirrored without repeating the edge (a b c | b a).
std::size_t reflect101(std::ptrdiff_t i, std::size_t n) {
    if (n == 1) return 0;
    const auto len = static_cast<std::ptrdiff_t>(n);
    if (i < 0) i = -i;
    if (i >= len) i = 2 * len - 2 - i;
    return static_cast<std::size_t>(i);
}

double laplacian_variance(const std::vector<double>& gray, std::size_t w, std::size_t h) {
    std::vector<double> response(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const auto sx = static_cast<std::ptrdiff_t>(x);
            const auto sy = static_cast<std::ptrdiff_t>(y);
            const double up = gray[reflect101(sy - 1, h) * w + x];
            const double down = gray[reflect101(sy + 1, h) * w + x];
            const double left = gray[y * w + reflect101(sx - 1, w)];
            const double right = gray[y * w + reflect101(sx + 1, w)];
            response[y * w + x] = up + down + left + right - 4.0 * gray[y * w + x];
        }
    }
    const double sd = mean_sd(response).sd;
    return sd * sd;
}

// Lowest threshold maximizing the between-class variance; classes are
// {<= t} and {> t}. Returns -1 for a single-level histogram.
int otsu_threshold(const std::array<std::size_t, 256>& hist, std::size_t total) {
    double total_sum = 0.0;
    for (int i = 0; i < 256; ++i) total_sum += i * static_cast<double>(hist[i]);
    double w0 = 0.0, sum0 = 0.0, best = 0.0;
    int best_t = -1;
    for (int t = 0; t < 255; ++t) {
        w0 += static_cast<double>(hist[t]);
        sum0 += t * static_cast<double>(hist[t]);
        const double w1 = static_cast<double>(total) - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (total_sum - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

std::size_t count_shapes(const std::vector<std::uint8_t>& inverted, std::size_t w, std::size_t h,
                         std::size_t area_min, std::size_t area_max) {
    std::array<std::size_t, 256> hist{};
    for (auto v : inverted) ++hist[v];
    const int t = otsu_threshold(hist, inverted.size());
    if (t < 0) return 0;

    std::vector<std::uint8_t> visited(w * h, 0);
    std::vector<std::size_t> stack;
    std::size_t count = 0;
    for (std::size_t start = 0; start < w * h; ++start) {
        if (visited[start] || inverted[start] <= t) continue;
        std::size_t area = 0;
        visited[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++area;
            const auto px = static_cast<std::ptrdiff_t>(p % w);
            const auto py = static_cast<std::ptrdiff_t>(p / w);
            for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
                for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                    const std::ptrdiff_t nx = px + dx, ny = py + dy;
                    if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w) ||
                        ny >= static_cast<std::ptrdiff_t>(h)) {
                        continue;
                    }
                    const std::size_t q = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
                    if (!visited[q] && inverted[q] > t) {
                        visited[q] = 1;
                        stack.push_back(q);
                    }
                }
            }
        }
        if (area >= area_min && area <= area_max) ++count;
    }
    return count;
}

}  // namespace

void CurationThresholds::check() const {
    const double values[] = {max_mean_v_background, max_mean_s_background, min_mean_v_dark, min_std_hsv, min_lap_var};
    for (double v : values) {
        if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "curation thresholds must be >= 0");
    }
    if (shape_area_min_px >= shape_area_max_px) {
        throw Error(ErrorCode::InvalidArgument, "shape_area_min_px must be < shape_area_max_px");
    }
}

std::string_view to_string(RejectReason r) noexcept {
    switch (r) {
        case RejectReason::None: return "accepted";
        case RejectReason::Background: return "background";
        case RejectReason::TooDark: return "too_dark";
        case RejectReason::LowVariation: return "low_variation";
        case RejectReason::Blurry: return "blurry";
        case RejectReason::TooFewShapes: return "too_few_shapes";
        case RejectReason::DecodeError: return "decode_error";
    }
    return "unknown";
}

PatchStats compute_patch_stats(const RgbImage& image, std::size_t shape_area_min_px, std::size_t shape_area_max_px) {
    if (image.empty() || image.pixels.size() != image.width * image.height * 3) {
        throw Error(ErrorCode::UnsupportedImage, "expected a non-empty 8-bit RGB image");
    }
    const std::size_t w = image.width, h = image.height, n = w * h;
    std::vector<double> hue(n), sat(n), val(n), gray(n);
    std::vector<std::uint8_t> inverted(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = image.pixels[3 * i], g = image.pixels[3 * i + 1], b = image.pixels[3 * i + 2];
        const Hsv hsv = rgb_to_hsv(r, g, b);
        hue[i] = hsv.h;
        sat[i] = hsv.s;
        val[i] = hsv.v;
        const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
        gray[i] = luma / 255.0;
        inverted[i] = static_cast<std::uint8_t>(255 - std::clamp(std::lround(luma), 0L, 255L));
    }
    const auto h_moments = mean_sd(hue);
    const auto s_moments = mean_sd(sat);
    const auto v_moments = mean_sd(val);
    PatchStats stats;
    stats.mean_s = s_moments.mean;
    stats.mean_v = v_moments.mean;
    stats.std_h = h_moments.sd;
    stats.std_s = s_moments.sd;
    stats.std_v = v_moments.sd;
    stats.lap_var = laplacian_variance(gray, w, h);
    stats.shape_count = count_shapes(inverted, w, h, shape_area_min_px, shape_area_max_px);
    return stats;
}

RejectReason classify(const PatchStats& s, const CurationThresholds& t) {
    if (s.mean_v > t.max_mean_v_background && s.mean_s < t.max_mean_s_background) return RejectReason::Background;
    if (s.mean_v < t.min_mean_v_dark) return RejectReason::TooDark;
    if (s.std_h < t.min_std_hsv || s.std_s < t.min_std_hsv || s.std_v < t.min_std_hsv) {
        return RejectReason::LowVariation;
    }
    if (s.lap_var < t.min_lap_var) return RejectReason::Blurry;
    if (s.shape_count < t.min_shape_count) return RejectReason::TooFewShapes;
    return RejectReason::None;
}

std::size_t CurationReport::accepted_count() const {
    return static_cast<std::size_t>(std::count_if(patches.begin(), patches.end(), [](const auto& p) { return p.accepted(); }));
}

std::size_t CurationReport::rejected_count() const { return patches.size() - accepted_count(); }

namespace {

bool is_image_file(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

CurationResult curate(const std::filesystem::path& input_dir, const CurationThresholds& t) {
    t.check();
    std::error_code ec;
    if (!std::filesystem::is_directory(input_dir, ec)) {
        throw Error(ErrorCode::IoFailure, "not a directory: " + input_dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (auto it = std::filesystem::recursive_directory_iterator(input_dir, ec);
         !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (it->is_regular_file() && is_image_file(it->path())) {
            files.push_back(std::filesystem::relative(it->path(), input_dir));
        }
    }
    if (ec) throw Error(ErrorCode::IoFailure, "listing " + input_dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.generic_string() < b.generic_string(); });

    CurationResult result;
    auto& patches = result.report.patches;
    patches.resize(files.size());
    parallel_for(
        files.size(),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                auto& out = patches[i];
                out.path = files[i].generic_string();
                try {
                    const auto image = read_image(input_dir / files[i]);
                    out.stats = compute_patch_stats(image, t.shape_area_min_px, t.shape_area_max_px);
                    out.reason = classify(*out.stats, t);
                } catch (const std::exception& e) {
                    out.reason = RejectReason::DecodeError;
                    out.error = e.what();
                }
            }
        },
        8);

    result.manifest.provenance.push_back("curate " + input_dir.generic_string());
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!patches[i].accepted()) continue;
        ManifestRecord r;
        auto id = files[i];
        id.replace_extension();
        r.id = id.generic_string();
        r.label = files[i].has_parent_path() ? files[i].parent_path().filename().string() : std::string{};
        r.source_path = files[i].generic_string();
        result.manifest.records.push_back(std::move(r));
    }
    return result;
}

void save_curation_report(const CurationReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    for (const auto& p : report.patches) {
        nlohmann::json j;
        j["path"] = p.path;
        if (p.stats) {
            j["stats"] = {{"mean_s", p.stats->mean_s}, {"mean_v", p.stats->mean_v}, {"std_h", p.stats->std_h},
                          {"std_s", p.stats->std_s},   {"std_v", p.stats->std_v},   {"lap_var", p.stats->lap_var},
                          {"shape_count", p.stats->shape_count}};
        } else {
            j["stats"] = nullptr;
        }
        j["accepted"] = p.accepted();
        j["reason"] = p.accepted() ? nlohmann::json(nullptr) : nlohmann::json(std::string(to_string(p.reason)));
        if (!p.error.empty()) j["error"] = p.error;
        out << j.dump() << '\n';
    }
}

}  // namespace histoprompt
