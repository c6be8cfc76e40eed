#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "histoprompt/core/manifest.hpp"
#include "histoprompt/curation/image.hpp"

namespace histoprompt {

struct PatchStats {
    double mean_s = 0.0;
    double mean_v = 0.0;
    double std_h = 0.0;
    double std_s = 0.0;
    double std_v = 0.0;
    double lap_var = 0.0;
    std::size_t shape_count = 0;

    bool operator==(const PatchStats&) const = default;
};

struct CurationThresholds {
    double max_mean_v_background = 0.94;
    double max_mean_s_background = 0.10;
    double min_mean_v_dark = 0.10;
    double min_std_hsv = 0.02;
    double min_lap_var = 0.002;
    std::size_t min_shape_count = 5;
    std::size_t shape_area_min_px = 10;
    std::size_t shape_area_max_px = 2000;

    /// Throws InvalidArgument on negative values or an empty area range.
    void check() const;
};

/// Order matters: the first failing check is reported.
enum class RejectReason { None, Background, TooDark, LowVariation, Blurry, TooFewShapes, DecodeError };

std::string_view to_string(RejectReason r) noexcept;

/// HSV statistics, Laplacian variance and blob count of one patch.
/// Throws UnsupportedImage for empty images.
PatchStats compute_patch_stats(const RgbImage& image, std::size_t shape_area_min_px = 10,
                               std::size_t shape_area_max_px = 2000);

/// First failing check in fixed order, or None.
RejectReason classify(const PatchStats& stats, const CurationThresholds& t);

struct PatchOutcome {
    std::string path;  // relative to the input directory
    std::optional<PatchStats> stats;
    RejectReason reason = RejectReason::None;
    std::string error;  // decode message when reason == DecodeError

    bool accepted() const noexcept { return reason == RejectReason::None; }
};

struct CurationReport {
    std::vector<PatchOutcome> patches;  // sorted by path

    std::size_t accepted_count() const;
    std::size_t rejected_count() const;
};

struct CurationResult {
    DatasetManifest manifest;
    CurationReport report;
};

/// Labels are taken from the immediate parent directory name when the image
/// sits in a subdirectory of input_dir (e.g. input/healthy/p1.png), else "".
/// Record ids are the relative path without extension.
CurationResult curate(const std::filesystem::path& input_dir, const CurationThresholds& t);

void save_curation_report(const CurationReport& report, const std::filesystem::path& path);

}  // namespace histoprompt
