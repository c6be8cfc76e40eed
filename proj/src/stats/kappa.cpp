#include "histoprompt/stats/kappa.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "histoprompt/core/error.hpp"

namespace histoprompt {

std::string_view interpret_kappa(double kappa) noexcept {
    constexpr double slack = 1e-9;
    if (kappa <= 0.0 + slack) return "No agreement";
    if (kappa <= 0.20 + slack) return "Poor/chance agreement";
    if (kappa <= 0.40 + slack) return "Slight agreement";
    if (kappa <= 0.60 + slack) return "Substantial agreement";
    if (kappa <= 0.80 + slack) return "Good agreement";
    if (kappa <= 0.92 + slack) return "Very good agreement";
    if (kappa < 1.0 - slack) return "Excellent agreement";
    return "Perfect agreement";
}

KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " labels");
    }
    if (a.empty()) throw Error(ErrorCode::EmptyInput, "kappa of empty label sequences");
    const double n = static_cast<double>(a.size());
    std::map<int, std::pair<std::size_t, std::size_t>> marginals;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++marginals[a[i]].first;
        ++marginals[b[i]].second;
        if (a[i] == b[i]) ++agree;
    }
    KappaResult out;
    out.observed = static_cast<double>(agree) / n;
    // Integer arithmetic keeps p_e exact enough to detect p_e == 1.
    std::size_t expected_num = 0;
    for (const auto& [label, counts] : marginals) expected_num += counts.first * counts.second;
    const std::size_t n2 = a.size() * a.size();
    out.expected = static_cast<double>(expected_num) / static_cast<double>(n2);
    if (expected_num == n2) {
        out.degenerate = true;
        out.kappa = agree == a.size() ? 1.0 : 0.0;
    } else {
        // (n*agree - sum)/(n^2 - sum) is the same ratio with one rounding.
        const double num = static_cast<double>(a.size() * agree) - static_cast<double>(expected_num);
        const double den = static_cast<double>(n2) - static_cast<double>(expected_num);
        out.kappa = num / den;
    }
    out.interpretation = interpret_kappa(out.kappa);
    return out;
}

KappaSummary pairwise_kappa_summary(const std::vector<std::string>& readers, const std::vector<std::vector<int>>& labels) {
    if (readers.size() < 2 || labels.size() != readers.size()) {
        throw Error(ErrorCode::InvalidArgument, "pairwise kappa needs at least two readers with one label row each");
    }
    const std::size_t r = readers.size();
    KappaSummary s;
    s.readers = readers;
    s.pairwise.assign(r, std::vector<double>(r, 1.0));
    std::vector<double> values;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = i + 1; j < r; ++j) {
            const auto k = cohen_kappa(labels[i], labels[j]);
            s.pairwise[i][j] = s.pairwise[j][i] = k.kappa;
            s.pairs.push_back({i, j, k.kappa, k.interpretation, k.kappa >= kReliabilityCriterion - 1e-12, k.degenerate});
            values.push_back(k.kappa);
        }
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mu = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mu) * (v - s.mu);
    s.sigma = std::sqrt(ss / static_cast<double>(values.size()));
    return s;
}

KappaSummary pairwise_kappa_summary(const std::vector<ResponseRecord>& responses, KappaSubset subset) {
    std::map<std::string, std::map<std::string, int>> by_reader;
    std::map<std::string, Truth> truth;
    for (const auto& r : responses) {
        by_reader[r.reader_id][r.item_id] = dichotomize(r.choice) == Truth::Synthetic ? 1 : 0;
        truth[r.item_id] = r.truth;
    }
    std::vector<std::string> readers;
    for (const auto& [reader, items] : by_reader) readers.push_back(reader);
    if (readers.size() < 2) throw Error(ErrorCode::InvalidArgument, "pairwise kappa needs at least two readers");

    std::vector<std::string> items;
    for (const auto& [item, t] : truth) {
        if (subset == KappaSubset::TruthReal && t != Truth::Real) continue;
        if (subset == KappaSubset::TruthSynthetic && t != Truth::Synthetic) continue;
        const bool everyone = std::all_of(by_reader.begin(), by_reader.end(),
                                          [&](const auto& entry) { return entry.second.contains(item); });
        if (everyone) items.push_back(item);
    }
    if (items.empty()) throw Error(ErrorCode::EmptyInput, "no item was answered by every reader in this subset");

    std::vector<std::vector<int>> labels;
    for (const auto& reader : readers) {
        std::vector<int> row;
        for (const auto& item : items) row.push_back(by_reader[reader][item]);
        labels.push_back(std::move(row));
    }
    return pairwise_kappa_summary(readers, labels);
}

}  // namespace histoprompt
