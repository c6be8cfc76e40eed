#include "histoprompt/pipeline/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "histoprompt/core/embedding_io.hpp"
#include "histoprompt/core/error.hpp"
#include "histoprompt/core/manifest.hpp"
#include "histoprompt/metrics/fid.hpp"
#include "histoprompt/metrics/precision_recall.hpp"
#include "histoprompt/morphology/kmeans.hpp"
#include "histoprompt/morphology/sd_index.hpp"
#include "histoprompt/sampling/balance.hpp"

namespace histoprompt {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::Curate: return "curate";
        case Stage::Cluster: return "cluster";
        case Stage::Prompt: return "prompt";
        case Stage::Balance: return "balance";
        case Stage::Split: return "split";
        case Stage::Metrics: return "metrics";
        case Stage::Grid: return "grid";
    }
    return "unknown";
}

Stage parse_stage(std::string_view name) {
    for (auto s : all_stages()) {
        if (to_string(s) == name) return s;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown stage '" + std::string(name) + "'");
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages{Stage::Curate, Stage::Cluster, Stage::Prompt, Stage::Balance,
                                           Stage::Split,  Stage::Metrics, Stage::Grid};
    return stages;
}

std::string_view version_string() noexcept { return "0.1.0"; }

json to_json(const RunManifest& m) {
    json artifacts = json::array();
    for (const auto& a : m.artifacts) {
        artifacts.push_back({{"stage", a.stage}, {"role", a.role}, {"path", a.path}, {"sha256", a.sha256}});
    }
    return {{"version", m.version}, {"config", m.config}, {"stages", m.stages}, {"artifacts", artifacts}};
}

namespace {

struct DigestDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
  public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw Error(ErrorCode::IoFailure, "SHA-256 unavailable");
        }
    }
    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 15];
        }
        return out;
    }

  private:
    std::unique_ptr<EVP_MD_CTX, DigestDeleter> ctx_;
};

// Directories hash as the digest of their sorted "relative-path\0file-hash\n" listing.
std::string sha256_path(const fs::path& path) {
    if (!fs::is_directory(path)) return sha256_file(path);
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
        if (e.is_regular_file()) entries.emplace_back(fs::relative(e.path(), path).generic_string(), sha256_file(e.path()));
    }
    std::sort(entries.begin(), entries.end());
    Sha256 h;
    for (const auto& [rel, digest] : entries) {
        h.update(rel.data(), rel.size());
        h.update("\0", 1);
        h.update(digest.data(), digest.size());
        h.update("\n", 1);
    }
    return h.hex();
}

class Runner {
  public:
    Runner(const PipelineConfig& cfg, RunManifest& manifest)
        : cfg_(cfg), wp_(work_paths(cfg.paths.work_dir)), manifest_(manifest) {}

    void run(Stage s) {
        stage_ = std::string(to_string(s));
        std::cerr << "[histoprompt] stage " << stage_ << '\n';
        switch (s) {
            case Stage::Curate: curate_stage(); break;
            case Stage::Cluster: cluster_stage(); break;
            case Stage::Prompt: prompt_stage(); break;
            case Stage::Balance: balance_stage(); break;
            case Stage::Split: split_stage(); break;
            case Stage::Metrics: metrics_stage(); break;
            case Stage::Grid: grid_stage(); break;
        }
    }

  private:
    // Checks that a dependency exists and records its hash.
    const fs::path& need(const fs::path& path, std::string_view what) {
        if (path.empty()) {
            throw Error(ErrorCode::MissingDependency,
                        "stage " + stage_ + ": no path configured for " + std::string(what));
        }
        if (!fs::exists(path)) {
            throw Error(ErrorCode::MissingDependency, "stage " + stage_ + ": missing " + path.string());
        }
        record("input", path);
        return path;
    }

    // Embeddings bring their sibling manifest along.
    const fs::path& need_embeddings(const fs::path& path, std::string_view what) {
        need(path, what);
        const auto sibling = sibling_manifest_path(path);
        if (fs::exists(sibling)) record("input", sibling);
        return path;
    }

    void produced(const fs::path& path) { record("output", path); }

    void record(const std::string& role, const fs::path& path) {
        manifest_.artifacts.push_back({stage_, role, path.generic_string(), sha256_path(path)});
    }

    void curate_stage() {
        const auto& dir = need(cfg_.paths.images_dir, "paths.images_dir");
        const auto result = curate(dir, cfg_.curation);
        std::cerr << "[histoprompt] curate: accepted " << result.report.accepted_count() << ", rejected "
                  << result.report.rejected_count() << '\n';
        save_manifest(result.manifest, wp_.curated_manifest);
        save_curation_report(result.report, wp_.curation_report);
        produced(wp_.curated_manifest);
        produced(wp_.curation_report);
    }

    KMeansOptions kmeans_options() const { return {cfg_.kmeans_tolerance, cfg_.kmeans_max_iterations}; }

    void cluster_stage() {
        const auto features = load_embeddings(need_embeddings(cfg_.paths.embeddings, "paths.embeddings"));
        const auto sel = select_k(features, cfg_.k_min, cfg_.k_max, cfg_.seeds.cluster, kmeans_options());
        std::cerr << "[histoprompt] cluster: chose k=" << sel.report.chosen_k << '\n';
        save_cluster_model(sel.model, wp_.cluster_model);
        save_sd_report(sel.report, wp_.sd_report);
        produced(wp_.cluster_model);
        produced(wp_.sd_report);
    }

    void prompt_stage() {
        const auto features = load_embeddings(need_embeddings(cfg_.paths.embeddings, "paths.embeddings"));
        const auto model = load_cluster_model(need(wp_.cluster_model, "cluster model"));
        const auto clusters = assign(model, features);
        DatasetManifest m;
        m.provenance.push_back("prompt k=" + std::to_string(model.k) + " seed=" + std::to_string(model.seed));
        for (std::size_t i = 0; i < features.rows; ++i) {
            if (features.labels.empty() || features.labels[i].empty()) {
                throw Error(ErrorCode::InvalidArgument, "stage prompt: row " + features.ids[i] + " has no label");
            }
            ManifestRecord r;
            r.id = features.ids[i];
            r.label = features.labels[i];
            r.cluster = clusters[i];
            r.prompt = build_prompt(r.label, clusters[i], PromptStyle::Enriched, cfg_.prompt).text;
            m.records.push_back(std::move(r));
        }
        save_manifest(m, wp_.prompts);
        produced(wp_.prompts);
    }

    void balance_stage() {
        const auto m = load_manifest(need(wp_.prompts, "prompt manifest"));
        const auto b = balance(m, cfg_.prompts_per_class, cfg_.balance_total, cfg_.seeds.balance);
        save_manifest(b.manifest, wp_.balanced);
        produced(wp_.balanced);
    }

    void split_stage() {
        BalancedManifest b;
        b.manifest = load_manifest(need(wp_.balanced, "balanced manifest"));
        b.seed = cfg_.seeds.balance;
        for (const auto& r : b.manifest.records) {
            if (r.prompt) ++b.per_prompt_quota[*r.prompt];
        }
        const auto [train, val] = split(b, cfg_.train_count, cfg_.val_count, cfg_.seeds.split);
        save_manifest(train, wp_.train);
        save_manifest(val, wp_.val);
        produced(wp_.train);
        produced(wp_.val);
    }

    void metrics_stage() {
        const auto real = load_embeddings(need_embeddings(cfg_.paths.real_features, "paths.real_features"));
        const auto synth = load_embeddings(need_embeddings(cfg_.paths.synth_features, "paths.synth_features"));
        const auto fid = compute_fid(real, synth);
        const auto pr = compute_improved_pr(real, synth, cfg_.metric_k);
        const json report{{"fid", fid.fid},   {"precision", pr.precision}, {"recall", pr.recall},
                          {"k", pr.k},        {"n_real", fid.n_real},      {"n_synth", fid.n_synth},
                          {"dim", fid.dim}};
        write_text(wp_.metrics, report.dump(2) + "\n");
        produced(wp_.metrics);
    }

    void grid_stage() {
        const auto& real_path = cfg_.paths.real_manifest.empty() ? wp_.train : cfg_.paths.real_manifest;
        const auto real = load_manifest(need(real_path, "paths.real_manifest"));
        const auto synth = load_manifest(need(cfg_.paths.synth_manifest, "paths.synth_manifest"));
        GridSpec spec = cfg_.grid;
        spec.seed = cfg_.seeds.grid;
        const auto plans = make_grid(spec, real, synth);
        save_plans(plans, wp_.plans);
        produced(wp_.plans);
    }

    static void write_text(const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
        out << text;
    }

    const PipelineConfig& cfg_;
    WorkPaths wp_;
    RunManifest& manifest_;
    std::string stage_;
};

}  // namespace

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

WorkPaths work_paths(const fs::path& work_dir) {
    return {work_dir / "curated.jsonl",   work_dir / "curation_report.jsonl", work_dir / "cluster_model.json",
            work_dir / "sd_index.csv",    work_dir / "prompts.jsonl",        work_dir / "balanced.jsonl",
            work_dir / "train.jsonl",     work_dir / "val.jsonl",            work_dir / "metrics.json",
            work_dir / "plans.jsonl",     work_dir / "run_manifest.json"};
}

RunManifest run_pipeline(const PipelineConfig& cfg, const std::vector<Stage>& stages) {
    RunManifest manifest;
    manifest.version = std::string(version_string());
    manifest.config = to_json(cfg);

    std::vector<Stage> ordered;
    for (auto s : all_stages()) {
        if (std::find(stages.begin(), stages.end(), s) != stages.end()) ordered.push_back(s);
    }
    fs::create_directories(cfg.paths.work_dir);
    Runner runner(cfg, manifest);
    for (auto s : ordered) {
        manifest.stages.emplace_back(to_string(s));
        runner.run(s);
    }

    const auto path = work_paths(cfg.paths.work_dir).run_manifest;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << to_json(manifest).dump(2) << '\n';
    return manifest;
}

}  // namespace histoprompt
