#include "histoprompt/pipeline/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>

#include "histoprompt/core/error.hpp"

namespace histoprompt {

using nlohmann::json;

namespace {

struct Field {
    std::function<json(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const json&)> set;
    std::function<json(const std::string&)> parse;          // flag text -> json
};

[[noreturn]] void type_error(const std::string& key, const std::string& expected) {
    throw Error(ErrorCode::TypeError, key + ": expected " + expected);
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}


template <typename T>
Field integer_field(const std::string& key, std::function<T&(PipelineConfig&)> ref) {
    return {[ref](const PipelineConfig& c) { return json(ref(const_cast<PipelineConfig&>(c))); },
            [key, ref](PipelineConfig& c, const json& v) {
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
                    type_error(key, "non-negative integer");
                }
                ref(c) = v.get<T>();
            },
            [key](const std::string& s) {
                const auto v = parse_uint(s);
                if (!v) type_error(key, "non-negative integer, got '" + s + "'");
                return json(*v);
            }};
}

Field double_field(const std::string& key, std::function<double&(PipelineConfig&)> ref) {
    return {[ref](const PipelineConfig& c) { return json(ref(const_cast<PipelineConfig&>(c))); },
            [key, ref](PipelineConfig& c, const json& v) {
                if (!v.is_number()) type_error(key, "number");
                ref(c) = v.get<double>();
            },
            [key](const std::string& s) {
                char* end = nullptr;
                const double v = std::strtod(s.c_str(), &end);
                if (s.empty() || end != s.c_str() + s.size()) type_error(key, "number, got '" + s + "'");
                return json(v);
            }};
}



Field list_field(const std::string& key, std::function<std::vector<std::size_t>&(PipelineConfig&)> ref) {
    return {[ref](const PipelineConfig& c) { return json(ref(const_cast<PipelineConfig&>(c))); },
            [key, ref](PipelineConfig& c, const json& v) {
                if (!v.is_array()) type_error(key, "array of non-negative integers");
                std::vector<std::size_t> out;
                for (const auto& e : v) {
                    if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() >= 0)) {
                        type_error(key, "array of non-negative integers");
                    }
                    out.push_back(e.get<std::size_t>());
                }
                ref(c) = std::move(out);
            },
            [key](const std::string& s) {
                json out = json::array();
                std::size_t start = 0;
                while (start <= s.size()) {
                    const auto comma = s.find(',', start);
                    const auto part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                    const auto v = parse_uint(part);
                    if (!v) type_error(key, "comma-separated integers, got '" + s + "'");
                    out.push_back(*v);
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
                return out;
            }};
}

Field path_field(const std::string& key, std::function<std::filesystem::path&(PipelineConfig&)> ref) {
    return {[ref](const PipelineConfig& c) { return json(ref(const_cast<PipelineConfig&>(c)).string()); },
            [key, ref](PipelineConfig& c, const json& v) {
                if (!v.is_string()) type_error(key, "string path");
                ref(c) = v.get<std::string>();
            },
            [](const std::string& s) { return json(s); }};
}

Field bool_field(const std::string& key, std::function<bool&(PipelineConfig&)> ref) {
    return {[ref](const PipelineConfig& c) { return json(ref(const_cast<PipelineConfig&>(c))); },
            [key, ref](PipelineConfig& c, const json& v) {
                if (!v.is_boolean()) type_error(key, "boolean");
                ref(c) = v.get<bool>();
            },
            [key](const std::string& s) {
                if (s == "true" || s == "1") return json(true);
                if (s == "false" || s == "0") return json(false);
                type_error(key, "true or false, got '" + s + "'");
            }};
}

Field index_style_field(const std::string& key) {
    return {[](const PipelineConfig& c) { return json(c.prompt.index_style == IndexStyle::Words ? "words" : "digits"); },
            [key](PipelineConfig& c, const json& v) {
                if (!v.is_string()) type_error(key, "\"words\" or \"digits\"");
                const auto s = v.get<std::string>();
                if (s == "words") {
                    c.prompt.index_style = IndexStyle::Words;
                } else if (s == "digits") {
                    c.prompt.index_style = IndexStyle::Digits;
                } else {
                    type_error(key, "\"words\" or \"digits\", got '" + s + "'");
                }
            },
            [](const std::string& s) { return json(s); }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["seeds.cluster"] = integer_field<std::uint64_t>("seeds.cluster", [](auto& c) -> auto& { return c.seeds.cluster; });
        t["seeds.balance"] = integer_field<std::uint64_t>("seeds.balance", [](auto& c) -> auto& { return c.seeds.balance; });
        t["seeds.split"] = integer_field<std::uint64_t>("seeds.split", [](auto& c) -> auto& { return c.seeds.split; });
        t["seeds.grid"] = integer_field<std::uint64_t>("seeds.grid", [](auto& c) -> auto& { return c.seeds.grid; });
        t["seeds.study"] = integer_field<std::uint64_t>("seeds.study", [](auto& c) -> auto& { return c.seeds.study; });

        t["curation.max_mean_v_background"] = double_field(
            "curation.max_mean_v_background", [](auto& c) -> auto& { return c.curation.max_mean_v_background; });
        t["curation.max_mean_s_background"] = double_field(
            "curation.max_mean_s_background", [](auto& c) -> auto& { return c.curation.max_mean_s_background; });
        t["curation.min_mean_v_dark"] =
            double_field("curation.min_mean_v_dark", [](auto& c) -> auto& { return c.curation.min_mean_v_dark; });
        t["curation.min_std_hsv"] =
            double_field("curation.min_std_hsv", [](auto& c) -> auto& { return c.curation.min_std_hsv; });
        t["curation.min_lap_var"] =
            double_field("curation.min_lap_var", [](auto& c) -> auto& { return c.curation.min_lap_var; });
        t["curation.min_shape_count"] =
            integer_field<std::size_t>("curation.min_shape_count", [](auto& c) -> auto& { return c.curation.min_shape_count; });
        t["curation.shape_area_min_px"] =
            integer_field<std::size_t>("curation.shape_area_min_px", [](auto& c) -> auto& { return c.curation.shape_area_min_px; });
        t["curation.shape_area_max_px"] =
            integer_field<std::size_t>("curation.shape_area_max_px", [](auto& c) -> auto& { return c.curation.shape_area_max_px; });

        t["cluster.k_min"] = integer_field<std::size_t>("cluster.k_min", [](auto& c) -> auto& { return c.k_min; });
        t["cluster.k_max"] = integer_field<std::size_t>("cluster.k_max", [](auto& c) -> auto& { return c.k_max; });
        t["cluster.max_iterations"] = integer_field<std::size_t>("cluster.max_iterations", [](auto& c) -> auto& { return c.kmeans_max_iterations; });
        t["cluster.tolerance"] = double_field("cluster.tolerance", [](auto& c) -> auto& { return c.kmeans_tolerance; });

        t["prompt.index_style"] = index_style_field("prompt.index_style");
        t["prompt.one_based"] = bool_field("prompt.one_based", [](auto& c) -> auto& { return c.prompt.one_based; });

        t["balance.prompts_per_class"] = integer_field<std::size_t>("balance.prompts_per_class", [](auto& c) -> auto& { return c.prompts_per_class; });
        t["balance.total"] = integer_field<std::size_t>("balance.total", [](auto& c) -> auto& { return c.balance_total; });
        t["split.train"] = integer_field<std::size_t>("split.train", [](auto& c) -> auto& { return c.train_count; });
        t["split.val"] = integer_field<std::size_t>("split.val", [](auto& c) -> auto& { return c.val_count; });
        t["metrics.k"] = integer_field<std::size_t>("metrics.k", [](auto& c) -> auto& { return c.metric_k; });

        t["grid.regimes"] = list_field("grid.regimes", [](auto& c) -> auto& { return c.grid.regimes; });
        t["grid.ratios"] = list_field("grid.ratios", [](auto& c) -> auto& { return c.grid.ratios_pct; });
        t["grid.folds"] = integer_field<std::size_t>("grid.folds", [](auto& c) -> auto& { return c.grid.folds; });

        t["paths.work_dir"] = path_field("paths.work_dir", [](auto& c) -> auto& { return c.paths.work_dir; });
        t["paths.images_dir"] = path_field("paths.images_dir", [](auto& c) -> auto& { return c.paths.images_dir; });
        t["paths.embeddings"] = path_field("paths.embeddings", [](auto& c) -> auto& { return c.paths.embeddings; });
        t["paths.real_features"] =
            path_field("paths.real_features", [](auto& c) -> auto& { return c.paths.real_features; });
        t["paths.synth_features"] =
            path_field("paths.synth_features", [](auto& c) -> auto& { return c.paths.synth_features; });
        t["paths.real_manifest"] =
            path_field("paths.real_manifest", [](auto& c) -> auto& { return c.paths.real_manifest; });
        t["paths.synth_manifest"] =
            path_field("paths.synth_manifest", [](auto& c) -> auto& { return c.paths.synth_manifest; });
        t["paths.study"] = path_field("paths.study", [](auto& c) -> auto& { return c.paths.study; });
        t["paths.study_log"] = path_field("paths.study_log", [](auto& c) -> auto& { return c.paths.study_log; });
        return t;
    }();
    return table;
}

const Field& field(const std::string& key) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw Error(ErrorCode::UnknownKey, "unknown config key '" + key + "'");
    return it->second;
}

}  // namespace

json to_json(const PipelineConfig& cfg) {
    json out = json::object();
    for (const auto& [key, f] : fields()) out[key] = f.get(cfg);
    return out;
}

void apply_setting(PipelineConfig& cfg, const std::string& key, const json& value) { field(key).set(cfg, value); }

void apply_flag(PipelineConfig& cfg, const std::string& key, const std::string& text) {
    const auto& f = field(key);
    f.set(cfg, f.parse(text));
}

PipelineConfig load_config(const std::map<std::string, std::string>& flags,
                           const std::optional<std::filesystem::path>& config_file) {
    PipelineConfig cfg;
    if (config_file) {
        std::ifstream in(*config_file, std::ios::binary);
        if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + config_file->string());
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, config_file->string() + ": " + e.what());
        }
        if (!j.is_object()) throw Error(ErrorCode::TypeError, config_file->string() + ": expected a JSON object");
        for (const auto& [key, value] : j.items()) apply_setting(cfg, key, value);
    }
    for (const auto& [key, text] : flags) apply_flag(cfg, key, text);
    cfg.curation.check();
    if (cfg.k_min < 2 || cfg.k_max < cfg.k_min) {
        throw Error(ErrorCode::InvalidArgument, "cluster sweep must satisfy 2 <= k_min <= k_max");
    }
    return cfg;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, f] : fields()) keys.push_back(key);
    return keys;
}

}  // namespace histoprompt
