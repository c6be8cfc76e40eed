#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "histoprompt/curation/patch_stats.hpp"
#include "histoprompt/morphology/prompts.hpp"
#include "histoprompt/sampling/grid.hpp"

namespace histoprompt {

struct PipelineConfig {
    struct Seeds {
        std::uint64_t cluster = 0;
        std::uint64_t balance = 0;
        std::uint64_t split = 0;
        std::uint64_t grid = 0;
        std::uint64_t study = 0;
    } seeds;

    CurationThresholds curation;

    std::size_t k_min = 2;
    std::size_t k_max = 50;
    std::size_t kmeans_max_iterations = 300;
    double kmeans_tolerance = 1e-6;

    PromptOptions prompt;

    std::size_t prompts_per_class = 21;
    std::size_t balance_total = 51'000;
    std::size_t train_count = 50'000;
    std::size_t val_count = 1'000;

    std::size_t metric_k = 3;

    GridSpec grid;

    struct Paths {
        std::filesystem::path work_dir = "work";
        std::filesystem::path images_dir;
        std::filesystem::path embeddings;
        std::filesystem::path real_features;
        std::filesystem::path synth_features;
        std::filesystem::path real_manifest;
        std::filesystem::path synth_manifest;
        std::filesystem::path study;
        std::filesystem::path study_log;
    } paths;
};

/// Flat dotted-key view of a config, e.g. {"balance.total": 51000}.
nlohmann::json to_json(const PipelineConfig& cfg);

/// Applies one key. Throws UnknownKey or TypeError naming the key.
void apply_setting(PipelineConfig& cfg, const std::string& key, const nlohmann::json& value);

/// Parses a command-line string for a key using that key's type, e.g.
/// "grid.regimes" accepts "10,25,50". Throws UnknownKey / TypeError.
void apply_flag(PipelineConfig& cfg, const std::string& key, const std::string& text);

/// Defaults, then the JSON config file (flat dotted keys), then flags.
PipelineConfig load_config(const std::map<std::string, std::string>& flags,
                           const std::optional<std::filesystem::path>& config_file = std::nullopt);

std::vector<std::string> config_keys();

}  // namespace histoprompt
