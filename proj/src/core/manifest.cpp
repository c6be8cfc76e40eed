#include "histoprompt/core/manifest.hpp"

#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "histoprompt/core/error.hpp"

namespace histoprompt {

namespace {

nlohmann::json record_to_json(const ManifestRecord& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["label"] = r.label;
    if (r.source_path) j["source_path"] = *r.source_path;
    if (r.cluster) j["cluster"] = *r.cluster;
    if (r.prompt) j["prompt"] = *r.prompt;
    return j;
}

ManifestRecord record_from_json(const nlohmann::json& j) {
    ManifestRecord r;
    r.id = j.at("id").get<std::string>();
    r.label = j.value("label", std::string{});
    if (auto it = j.find("source_path"); it != j.end() && !it->is_null()) r.source_path = it->get<std::string>();
    if (auto it = j.find("cluster"); it != j.end() && !it->is_null()) r.cluster = it->get<int>();
    if (auto it = j.find("prompt"); it != j.end() && !it->is_null()) r.prompt = it->get<std::string>();
    return r;
}

}  // namespace

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    for (const auto& step : m.provenance) {
        out << nlohmann::json{{"provenance", step}}.dump() << '\n';
    }
    for (const auto& r : m.records) out << record_to_json(r).dump() << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    DatasetManifest m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            if (j.contains("provenance")) {
                m.provenance.push_back(j.at("provenance").get<std::string>());
            } else {
                m.records.push_back(record_from_json(j));
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::IoFailure,
                        path.string() + ":" + std::to_string(line_no) + ": malformed record (" + e.what() + ")");
        }
    }
    return m;
}

std::string_view to_string(IssueKind kind) noexcept {
    switch (kind) {
        case IssueKind::DuplicateId: return "DuplicateId";
        case IssueKind::CountMismatch: return "CountMismatch";
        case IssueKind::UnknownLabel: return "UnknownLabel";
        case IssueKind::IdMismatch: return "IdMismatch";
        case IssueKind::ClusterOutOfRange: return "ClusterOutOfRange";
    }
    return "Unknown";
}

ValidationReport validate_manifest(const DatasetManifest& m, const FeatureSet& fs, const ValidationOptions& options) {
    ValidationReport report;
    if (m.records.size() != fs.rows) {
        report.issues.push_back({IssueKind::CountMismatch, "manifest has " + std::to_string(m.records.size()) +
                                                               " records, feature set has " + std::to_string(fs.rows)});
    }
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        const auto& r = m.records[i];
        if (auto [it, inserted] = seen.emplace(r.id, i); !inserted) {
            report.issues.push_back({IssueKind::DuplicateId, r.id});
        }
        if (!options.declared_labels.empty() && !options.declared_labels.contains(r.label)) {
            report.issues.push_back({IssueKind::UnknownLabel, r.id + ": " + r.label});
        }
        if (options.cluster_count && r.cluster && (*r.cluster < 0 || *r.cluster >= *options.cluster_count)) {
            report.issues.push_back({IssueKind::ClusterOutOfRange, r.id + ": " + std::to_string(*r.cluster)});
        }
        if (i < fs.ids.size() && fs.ids[i] != r.id) {
            report.issues.push_back({IssueKind::IdMismatch, "row " + std::to_string(i) + ": manifest " + r.id +
                                                                " vs features " + fs.ids[i]});
        }
    }
    return report;
}

}  // namespace histoprompt
