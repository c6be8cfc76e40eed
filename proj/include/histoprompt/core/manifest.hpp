#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "histoprompt/core/feature_set.hpp"

namespace histoprompt {

struct ManifestRecord {
    std::string id;
    std::string label;
    std::optional<std::string> source_path;
    std::optional<int> cluster;
    std::optional<std::string> prompt;

    bool operator==(const ManifestRecord&) const = default;
};

struct DatasetManifest {
    std::vector<ManifestRecord> records;
    std::vector<std::string> provenance;
};

/// Newline-delimited JSON, one record per line. Provenance lines are stored
/// as {"provenance": "..."} entries ahead of the records.
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

enum class IssueKind { DuplicateId, CountMismatch, UnknownLabel, IdMismatch, ClusterOutOfRange };

struct ValidationIssue {
    IssueKind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const noexcept { return issues.empty(); }
};

std::string_view to_string(IssueKind kind) noexcept;

struct ValidationOptions {
    /// Empty means "do not check labels".
    std::set<std::string> declared_labels;
    /// Clusters must be in [0, k) when set.
    std::optional<int> cluster_count;
};

ValidationReport validate_manifest(const DatasetManifest& m, const FeatureSet& fs,
                                   const ValidationOptions& options = {});

}  // namespace histoprompt
