#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "histoprompt/pipeline/config.hpp"

namespace histoprompt {

enum class Stage { Curate, Cluster, Prompt, Balance, Split, Metrics, Grid };

std::string_view to_string(Stage s) noexcept;
/// Throws InvalidArgument.
Stage parse_stage(std::string_view name);
/// Execution order.
const std::vector<Stage>& all_stages();

struct ArtifactEntry {
    std::string stage;
    std::string role;  // "input" or "output"
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::string version;
    nlohmann::json config;
    std::vector<std::string> stages;
    std::vector<ArtifactEntry> artifacts;
};

nlohmann::json to_json(const RunManifest& m);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Runs the requested stages in dependency order. Each stage checks its
/// input files first and throws MissingDependency naming the stage and file.
/// Writes <work_dir>/run_manifest.json and returns the manifest.
RunManifest run_pipeline(const PipelineConfig& cfg, const std::vector<Stage>& stages);

/// Output locations under the work directory.
struct WorkPaths {
    std::filesystem::path curated_manifest;
    std::filesystem::path curation_report;
    std::filesystem::path cluster_model;
    std::filesystem::path sd_report;
    std::filesystem::path prompts;
    std::filesystem::path balanced;
    std::filesystem::path train;
    std::filesystem::path val;
    std::filesystem::path metrics;
    std::filesystem::path plans;
    std::filesystem::path run_manifest;
};
WorkPaths work_paths(const std::filesystem::path& work_dir);

std::string_view version_string() noexcept;

}  // namespace histoprompt
