#include "histoprompt/sampling/balance.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "histoprompt/core/error.hpp"
#include "histoprompt/core/random.hpp"

namespace histoprompt {

namespace {

struct PromptGroup {
    std::string prompt;
    std::string label;
    std::vector<std::size_t> rows;  // indices into the source manifest, ascending
};

// Larger population first, then prompt text.
bool more_populated(const PromptGroup* a, const PromptGroup* b) {
    if (a->rows.size() != b->rows.size()) return a->rows.size() > b->rows.size();
    return a->prompt < b->prompt;
}

}  // namespace

std::size_t BalancedManifest::total() const {
    std::size_t sum = 0;
    for (const auto& [prompt, count] : per_prompt_quota) sum += count;
    return sum;
}

std::vector<std::size_t> uniform_quotas(std::size_t prompts, std::size_t total) {
    if (prompts == 0) return {};
    std::vector<std::size_t> q(prompts, total / prompts);
    for (std::size_t i = 0; i < total % prompts; ++i) ++q[i];
    return q;
}

BalancedManifest balance(const DatasetManifest& m, std::size_t prompts_per_class, std::size_t total,
                         std::uint64_t seed) {
    if (prompts_per_class == 0) throw Error(ErrorCode::InvalidArgument, "prompts_per_class must be >= 1");

    std::map<std::string, PromptGroup> groups;
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        const auto& r = m.records[i];
        if (!r.prompt) throw Error(ErrorCode::InvalidArgument, "record " + r.id + " has no prompt");
        auto& g = groups[*r.prompt];
        if (g.rows.empty()) {
            g.prompt = *r.prompt;
            g.label = r.label;
        } else if (g.label != r.label) {
            throw Error(ErrorCode::InvalidArgument, "prompt '" + *r.prompt + "' spans labels " + g.label + " and " + r.label);
        }
        g.rows.push_back(i);
    }

    std::map<std::string, std::vector<const PromptGroup*>> by_label;
    for (const auto& [prompt, g] : groups) by_label[g.label].push_back(&g);

    std::vector<const PromptGroup*> selected;
    for (auto& [label, list] : by_label) {
        if (list.size() < prompts_per_class) {
            throw Error(ErrorCode::InsufficientPrompts, "label '" + label + "' has " + std::to_string(list.size()) +
                                                            " distinct prompts, need " + std::to_string(prompts_per_class));
        }
        std::sort(list.begin(), list.end(), more_populated);
        selected.insert(selected.end(), list.begin(), list.begin() + static_cast<std::ptrdiff_t>(prompts_per_class));
    }
    std::sort(selected.begin(), selected.end(), more_populated);

    const auto quotas = uniform_quotas(selected.size(), total);
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (selected[i]->rows.size() < quotas[i]) {
            throw Error(ErrorCode::InsufficientExamples, "prompt '" + selected[i]->prompt + "' has " +
                                                             std::to_string(selected[i]->rows.size()) +
                                                             " records, quota is " + std::to_string(quotas[i]));
        }
    }

    BalancedManifest out;
    out.seed = seed;
    std::vector<std::size_t> keep;
    keep.reserve(total);
    for (std::size_t i = 0; i < selected.size(); ++i) {
        const auto& g = *selected[i];
        Rng rng(derive_seed(seed, fnv1a(g.prompt)));
        for (auto pick : rng.sample_indices(g.rows.size(), quotas[i])) keep.push_back(g.rows[pick]);
        out.per_prompt_quota[g.prompt] = quotas[i];
    }
    std::sort(keep.begin(), keep.end());
    out.manifest.provenance = m.provenance;
    out.manifest.provenance.push_back("balance prompts_per_class=" + std::to_string(prompts_per_class) +
                                      " total=" + std::to_string(total) + " seed=" + std::to_string(seed));
    out.manifest.records.reserve(keep.size());
    for (auto i : keep) out.manifest.records.push_back(m.records[i]);
    return out;
}

std::pair<DatasetManifest, DatasetManifest> split(const BalancedManifest& b, std::size_t train, std::size_t val,
                                                  std::uint64_t seed) {
    const std::size_t total = b.manifest.records.size();
    if (train + val != total) {
        throw Error(ErrorCode::CountMismatch, "train + val = " + std::to_string(train + val) + " but manifest holds " +
                                                  std::to_string(total));
    }
    std::map<std::string, std::vector<std::size_t>> rows;
    for (std::size_t i = 0; i < total; ++i) {
        const auto& r = b.manifest.records[i];
        if (!r.prompt) throw Error(ErrorCode::InvalidArgument, "record " + r.id + " has no prompt");
        rows[*r.prompt].push_back(i);
    }

    // Validation quota per prompt: near-uniform, larger prompts take the +1.
    std::vector<std::pair<std::string, std::size_t>> order;
    for (const auto& [prompt, list] : rows) order.emplace_back(prompt, list.size());
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& c) { return a.second > c.second; });
    const auto val_quota = uniform_quotas(order.size(), val);

    std::vector<char> is_val(total, 0);
    for (std::size_t p = 0; p < order.size(); ++p) {
        auto list = rows[order[p].first];
        if (val_quota[p] > list.size()) {
            throw Error(ErrorCode::CountMismatch, "prompt '" + order[p].first + "' cannot supply " +
                                                      std::to_string(val_quota[p]) + " validation records");
        }
        Rng rng(derive_seed(seed, fnv1a(order[p].first)));
        rng.shuffle(list);
        for (std::size_t i = 0; i < val_quota[p]; ++i) is_val[list[i]] = 1;
    }

    DatasetManifest train_m, val_m;
    train_m.provenance = b.manifest.provenance;
    train_m.provenance.push_back("split train=" + std::to_string(train) + " seed=" + std::to_string(seed));
    val_m.provenance = b.manifest.provenance;
    val_m.provenance.push_back("split val=" + std::to_string(val) + " seed=" + std::to_string(seed));
    for (std::size_t i = 0; i < total; ++i) {
        (is_val[i] ? val_m : train_m).records.push_back(b.manifest.records[i]);
    }
    return {std::move(train_m), std::move(val_m)};
}

}  // namespace histoprompt
