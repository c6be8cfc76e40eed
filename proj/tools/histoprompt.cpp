// Command line entry point. Data goes to files or stdout, logs to stderr.

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "histoprompt/core/embedding_io.hpp"
#include "histoprompt/core/error.hpp"
#include "histoprompt/core/manifest.hpp"
#include "histoprompt/curation/patch_stats.hpp"
#include "histoprompt/metrics/fid.hpp"
#include "histoprompt/metrics/precision_recall.hpp"
#include "histoprompt/morphology/kmeans.hpp"
#include "histoprompt/morphology/prompts.hpp"
#include "histoprompt/morphology/sd_index.hpp"
#include "histoprompt/pipeline/config.hpp"
#include "histoprompt/pipeline/pipeline.hpp"
#include "histoprompt/sampling/balance.hpp"
#include "histoprompt/sampling/grid.hpp"
#include "histoprompt/stats/kappa.hpp"
#include "histoprompt/stats/leadtime.hpp"
#include "histoprompt/stats/reader.hpp"
#include "histoprompt/stats/responses.hpp"
#include "histoprompt/study/server.hpp"
#include "histoprompt/study/study.hpp"

namespace fs = std::filesystem;
namespace hp = histoprompt;
using nlohmann::json;

namespace {

void log(const std::string& msg) { std::cerr << "[histoprompt] " << msg << '\n'; }

void emit(const json& report, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << report.dump(2) << '\n';
        return;
    }
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw hp::Error(hp::ErrorCode::IoFailure, "cannot write " + out);
    f << report.dump(2) << '\n';
    log("wrote " + out);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json performance_json(const hp::ReaderPerformance& p) {
    return {{"reader_id", p.reader_id},
            {"tp", p.confusion.tp},
            {"fp", p.confusion.fp},
            {"fn", p.confusion.fn},
            {"tn", p.confusion.tn},
            {"accuracy", p.accuracy},
            {"sensitivity", opt(p.sensitivity)},
            {"specificity", opt(p.specificity)},
            {"ppv", opt(p.ppv)},
            {"npv", opt(p.npv)},
            {"p_value", p.p_value},
            {"confidence", p.confidence}};
}

json kappa_json(const hp::KappaSummary& s) {
    json pairs = json::array();
    for (const auto& p : s.pairs) {
        pairs.push_back({{"a", s.readers[p.a]},
                         {"b", s.readers[p.b]},
                         {"kappa", p.kappa},
                         {"interpretation", p.interpretation},
                         {"meets_criterion", p.meets_criterion},
                         {"degenerate", p.degenerate}});
    }
    return {{"readers", s.readers}, {"pairwise", s.pairwise}, {"mu", s.mu}, {"sigma", s.sigma}, {"pairs", pairs}};
}

json group_json(const hp::GroupSummary& g) {
    return {{"count", g.count}, {"mean", g.mean}, {"sd", g.sd}, {"ks_statistic", g.ks_statistic}, {"ks_p_value", g.ks_p_value}};
}

std::vector<fs::path> images_in(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        auto ext = e.path().extension().string();
        for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (e.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".jpeg")) out.push_back(fs::absolute(e.path()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

hp::study::StudyServer* g_server = nullptr;
extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"histoprompt: histopathology prompt curation, evaluation and reader-study toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hp::version_string()));

    std::string config_file;
    std::vector<std::string> settings;
    app.add_option("--config", config_file, "JSON config with flat dotted keys")->check(CLI::ExistingFile);
    app.add_option("--set", settings, "Override a config key, key=value (repeatable)");

    hp::PipelineConfig cfg;
    std::optional<std::uint64_t> seed;
    std::string out;

    // curate
    auto* curate = app.add_subcommand("curate", "Filter image patches with the curation heuristics");
    std::string images_dir, report_path;
    curate->add_option("--images", images_dir, "Directory of <label>/<patch> images")->required()->check(CLI::ExistingDirectory);
    curate->add_option("--out", out, "Accepted-patch manifest (.jsonl)")->required();
    curate->add_option("--report", report_path, "Per-patch statistics report (.jsonl)");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Fit k-means, choosing k with the SD validity index");
    std::string features, sd_csv;
    std::optional<std::size_t> fixed_k, k_min, k_max;
    cluster->add_option("--features", features, "Embeddings (.emb)")->required()->check(CLI::ExistingFile);
    cluster->add_option("--out", out, "Cluster model (.json)")->required();
    cluster->add_option("--sd-report", sd_csv, "Per-k SD index table (.csv)");
    cluster->add_option("--k", fixed_k, "Fit this k instead of sweeping");
    cluster->add_option("--k-min", k_min, "Sweep lower bound");
    cluster->add_option("--k-max", k_max, "Sweep upper bound");
    cluster->add_option("--seed", seed);

    // assign
    auto* assign_cmd = app.add_subcommand("assign", "Assign rows to their nearest centroid");
    std::string model_path;
    assign_cmd->add_option("--features", features, "Embeddings (.emb) with sibling manifest")->required()->check(CLI::ExistingFile);
    assign_cmd->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
    assign_cmd->add_option("--out", out, "Manifest with cluster ids (.jsonl)")->required();

    // prompt
    auto* prompt = app.add_subcommand("prompt", "Attach text prompts to a clustered manifest");
    std::string manifest_path, style = "enriched";
    prompt->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    prompt->add_option("--out", out)->required();
    prompt->add_option("--style", style)->check(CLI::IsMember({"baseline", "enriched"}));

    // balance
    auto* balance = app.add_subcommand("balance", "Undersample to the most populated prompts per class");
    std::optional<std::size_t> per_class, total;
    balance->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    balance->add_option("--out", out)->required();
    balance->add_option("--prompts-per-class", per_class);
    balance->add_option("--total", total);
    balance->add_option("--seed", seed);

    // split
    auto* split = app.add_subcommand("split", "Split a balanced manifest into train and validation");
    std::string train_out, val_out;
    std::optional<std::size_t> train_count, val_count;
    split->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    split->add_option("--train", train_out)->required();
    split->add_option("--val", val_out)->required();
    split->add_option("--train-count", train_count);
    split->add_option("--val-count", val_count);
    split->add_option("--seed", seed);

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Distribution metrics between two feature sets");
    metrics->require_subcommand(1);
    std::string real_path, synth_path;
    std::optional<std::size_t> metric_k;
    auto* fid = metrics->add_subcommand("fid", "Frechet distance between Gaussian fits");
    auto* pr = metrics->add_subcommand("pr", "Improved precision and recall");
    for (auto* sub : {fid, pr}) {
        sub->add_option("--real", real_path)->required()->check(CLI::ExistingFile);
        sub->add_option("--synth", synth_path)->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "JSON report (default stdout)");
    }
    pr->add_option("--k", metric_k, "Neighbourhood size");

    // grid
    auto* grid = app.add_subcommand("grid", "Augmentation experiment grid");
    grid->require_subcommand(1);
    auto* grid_make = grid->add_subcommand("make", "Emit one sampling plan per (regime, ratio, fold)");
    grid_make->add_option("--real", real_path, "Real manifest (.jsonl)")->required()->check(CLI::ExistingFile);
    grid_make->add_option("--synth", synth_path, "Synthetic manifest (.jsonl)")->required()->check(CLI::ExistingFile);
    grid_make->add_option("--out", out, "Plans (.jsonl)")->required();
    grid_make->add_option("--seed", seed);
    auto* grid_agg = grid->add_subcommand("aggregate", "Summarise per-plan results into median/IQR cells");
    std::string results_path;
    bool strict = false;
    grid_agg->add_option("--results", results_path, "Results (.jsonl: regime, ratio_pct, fold, auc)")->required()->check(CLI::ExistingFile);
    grid_agg->add_option("--out", out, "Summary (.csv)")->required();
    grid_agg->add_flag("--strict", strict, "Require every cell of the configured grid to be present");

    // study
    auto* study = app.add_subcommand("study", "Reader study");
    study->require_subcommand(1);
    std::string study_path, log_path, host = "127.0.0.1";
    int port = 8080;
    std::string study_id = "study";
    std::size_t n_real = 20, n_synth = 20;
    auto* compose = study->add_subcommand("compose", "Build a study definition from two image folders");
    compose->add_option("--real", real_path, "Directory of real images")->required()->check(CLI::ExistingDirectory);
    compose->add_option("--synth", synth_path, "Directory of synthetic images")->required()->check(CLI::ExistingDirectory);
    compose->add_option("--out", out, "Study definition (.json)")->required();
    compose->add_option("--id", study_id);
    compose->add_option("--n-real", n_real);
    compose->add_option("--n-synth", n_synth);
    compose->add_option("--seed", seed);
    auto* serve = study->add_subcommand("serve", "Serve the study over HTTP until interrupted");
    serve->add_option("--study", study_path)->required()->check(CLI::ExistingFile);
    serve->add_option("--log", log_path, "Append-only event log (.jsonl)")->required();
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    auto* study_export = study->add_subcommand("export", "Replay the event log and write responses.csv");
    study_export->add_option("--study", study_path)->required()->check(CLI::ExistingFile);
    study_export->add_option("--log", log_path)->required()->check(CLI::ExistingFile);
    study_export->add_option("--out", out, "CSV (default stdout)");

    // stats
    auto* stats = app.add_subcommand("stats", "Reader study statistics");
    stats->require_subcommand(1);
    std::string responses_path, subset = "all";
    auto* readers = stats->add_subcommand("readers", "Per-reader confusion, accuracy and binomial p-value");
    auto* kappa = stats->add_subcommand("kappa", "Pairwise Cohen's kappa between readers");
    auto* leadtime = stats->add_subcommand("leadtime", "Lead-time normality and rank-sum tests");
    for (auto* sub : {readers, kappa, leadtime}) {
        sub->add_option("--responses", responses_path, "responses.csv")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "JSON report (default stdout)");
    }
    kappa->add_option("--subset", subset)->check(CLI::IsMember({"all", "real", "synthetic"}));

    // run
    auto* run = app.add_subcommand("run", "Run pipeline stages from the config");
    std::vector<std::string> stage_names;
    run->add_option("--stages", stage_names, "Stages to run (default: all)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        std::map<std::string, std::string> flags;
        for (const auto& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw hp::Error(hp::ErrorCode::InvalidArgument, "--set expects key=value, got " + s);
            flags[s.substr(0, eq)] = s.substr(eq + 1);
        }
        cfg = hp::load_config(flags, config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file));
        const hp::KMeansOptions kopts{cfg.kmeans_tolerance, cfg.kmeans_max_iterations};

        if (curate->parsed()) {
            const auto result = hp::curate(images_dir, cfg.curation);
            hp::save_manifest(result.manifest, out);
            if (!report_path.empty()) hp::save_curation_report(result.report, report_path);
            log("accepted " + std::to_string(result.report.accepted_count()) + ", rejected " +
                std::to_string(result.report.rejected_count()));
        } else if (cluster->parsed()) {
            const auto fs_ = hp::load_embeddings(features);
            const auto s = seed.value_or(cfg.seeds.cluster);
            if (fixed_k) {
                hp::save_cluster_model(hp::kmeans_fit(fs_, *fixed_k, s, kopts), out);
            } else {
                const auto sel = hp::select_k(fs_, k_min.value_or(cfg.k_min), k_max.value_or(cfg.k_max), s, kopts);
                hp::save_cluster_model(sel.model, out);
                if (!sd_csv.empty()) hp::save_sd_report(sel.report, sd_csv);
                log("chose k=" + std::to_string(sel.report.chosen_k));
            }
        } else if (assign_cmd->parsed()) {
            const auto fs_ = hp::load_embeddings(features);
            const auto model = hp::load_cluster_model(model_path);
            const auto ids = hp::assign(model, fs_);
            hp::DatasetManifest m;
            m.provenance.push_back("assign k=" + std::to_string(model.k));
            for (std::size_t i = 0; i < fs_.rows; ++i) {
                hp::ManifestRecord r;
                r.id = fs_.ids[i];
                r.label = fs_.labels.empty() ? std::string{} : fs_.labels[i];
                r.cluster = ids[i];
                m.records.push_back(std::move(r));
            }
            hp::save_manifest(m, out);
        } else if (prompt->parsed()) {
            auto m = hp::load_manifest(manifest_path);
            const auto st = style == "baseline" ? hp::PromptStyle::Baseline : hp::PromptStyle::Enriched;
            for (auto& r : m.records) {
                if (st == hp::PromptStyle::Enriched && !r.cluster) {
                    throw hp::Error(hp::ErrorCode::MissingCluster, "record " + r.id + " has no cluster");
                }
                r.prompt = hp::build_prompt(r.label, r.cluster, st, cfg.prompt).text;
            }
            m.provenance.push_back("prompt style=" + style);
            hp::save_manifest(m, out);
        } else if (balance->parsed()) {
            const auto b = hp::balance(hp::load_manifest(manifest_path), per_class.value_or(cfg.prompts_per_class),
                                       total.value_or(cfg.balance_total), seed.value_or(cfg.seeds.balance));
            hp::save_manifest(b.manifest, out);
            log("kept " + std::to_string(b.total()) + " records over " + std::to_string(b.per_prompt_quota.size()) + " prompts");
        } else if (split->parsed()) {
            hp::BalancedManifest b;
            b.manifest = hp::load_manifest(manifest_path);
            const auto [train, val] = hp::split(b, train_count.value_or(cfg.train_count), val_count.value_or(cfg.val_count),
                                                seed.value_or(cfg.seeds.split));
            hp::save_manifest(train, train_out);
            hp::save_manifest(val, val_out);
        } else if (fid->parsed()) {
            const auto r = hp::compute_fid(hp::load_embeddings(real_path), hp::load_embeddings(synth_path));
            emit({{"fid", r.fid}, {"n_real", r.n_real}, {"n_synth", r.n_synth}, {"dim", r.dim}}, out);
        } else if (pr->parsed()) {
            const auto r = hp::compute_improved_pr(hp::load_embeddings(real_path), hp::load_embeddings(synth_path),
                                                   metric_k.value_or(cfg.metric_k));
            emit({{"precision", r.precision}, {"recall", r.recall}, {"k", r.k}, {"n_real", r.n_real}, {"n_synth", r.n_synth}}, out);
        } else if (grid_make->parsed()) {
            auto spec = cfg.grid;
            spec.seed = seed.value_or(cfg.seeds.grid);
            const auto plans = hp::make_grid(spec, hp::load_manifest(real_path), hp::load_manifest(synth_path));
            hp::save_plans(plans, out);
            log("wrote " + std::to_string(plans.size()) + " plans");
        } else if (grid_agg->parsed()) {
            const auto summary = hp::aggregate_results(hp::load_results(results_path), strict ? &cfg.grid : nullptr);
            hp::save_summary_csv(summary, out);
        } else if (compose->parsed()) {
            const auto def = hp::study::compose_study(study_id, images_in(real_path), images_in(synth_path),
                                                      seed.value_or(cfg.seeds.study), n_real, n_synth);
            hp::study::save_study(def, out);
        } else if (serve->parsed()) {
            hp::study::StudyStore store(hp::study::load_study(study_path), log_path);
            hp::study::StudyServer server(store);
            const int bound = server.bind(host, port);
            if (bound < 0) throw hp::Error(hp::ErrorCode::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            log("serving study " + store.definition().study_id + " on http://" + host + ":" + std::to_string(bound));
            server.listen();
            g_server = nullptr;
        } else if (study_export->parsed()) {
            hp::study::StudyStore store(hp::study::load_study(study_path), log_path);
            if (out.empty() || out == "-") {
                std::cout << store.export_csv();
            } else {
                store.export_csv(out);
            }
        } else if (readers->parsed()) {
            json rows = json::array();
            for (const auto& p : hp::all_reader_performance(hp::load_responses_csv(responses_path))) {
                rows.push_back(performance_json(p));
            }
            emit({{"readers", rows}}, out);
        } else if (kappa->parsed()) {
            const auto sub = subset == "real"        ? hp::KappaSubset::TruthReal
                             : subset == "synthetic" ? hp::KappaSubset::TruthSynthetic
                                                     : hp::KappaSubset::All;
            emit(kappa_json(hp::pairwise_kappa_summary(hp::load_responses_csv(responses_path), sub)), out);
        } else if (leadtime->parsed()) {
            const auto report = hp::leadtime_analysis(hp::group_lead_times(hp::load_responses_csv(responses_path)));
            json rows = json::array();
            for (const auto& r : report.readers) {
                rows.push_back({{"reader_id", r.reader_id},
                                {"real", group_json(r.real)},
                                {"synthetic", group_json(r.synthetic)},
                                {"intra_p", r.intra_p},
                                {"inter_real_p", r.inter_real_p},
                                {"inter_synthetic_p", r.inter_synthetic_p}});
            }
            emit({{"readers", rows}, {"pooled_real", group_json(report.pooled_real)},
                  {"pooled_synthetic", group_json(report.pooled_synthetic)}},
                 out);
        } else if (run->parsed()) {
            std::vector<hp::Stage> stages;
            if (stage_names.empty()) {
                stages = hp::all_stages();
            } else {
                for (const auto& n : stage_names) stages.push_back(hp::parse_stage(n));
            }
            const auto manifest = hp::run_pipeline(cfg, stages);
            log("run manifest: " + hp::work_paths(cfg.paths.work_dir).run_manifest.string() + " (" +
                std::to_string(manifest.artifacts.size()) + " artifacts)");
        }
        return 0;
    } catch (const hp::Error& e) {
        log(std::string("error: ") + e.what());
        return hp::exit_code_for(e.code());
    } catch (const std::exception& e) {
        log(std::string("error: ") + e.what());
        return 4;
    }
}
