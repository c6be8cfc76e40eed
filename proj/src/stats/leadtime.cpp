#include "histoprompt/stats/leadtime.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "histoprompt/core/error.hpp"
#include "histoprompt/stats/tests.hpp"

namespace histoprompt {

namespace {

GroupSummary summarize(const std::vector<double>& xs) {
    GroupSummary g;
    g.count = xs.size();
    g.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - g.mean) * (x - g.mean);
    g.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    const auto ks = ks_normality(xs);
    g.ks_statistic = ks.statistic;
    g.ks_p_value = ks.p_value;
    return g;
}

const std::vector<double>& group_of(const LeadTimeGroups& groups, const std::string& reader, Truth t) {
    const auto& by_truth = groups.at(reader);
    const auto it = by_truth.find(t);
    if (it == by_truth.end() || it->second.empty()) {
        throw Error(ErrorCode::EmptyGroup, "reader " + reader + " has no " + std::string(to_string(t)) + " lead times");
    }
    return it->second;
}

}  // namespace

LeadTimeGroups group_lead_times(const std::vector<ResponseRecord>& responses) {
    LeadTimeGroups groups;
    for (const auto& r : responses) groups[r.reader_id][r.truth].push_back(r.lead_time_s);
    return groups;
}

LeadTimeReport leadtime_analysis(const LeadTimeGroups& groups) {
    if (groups.empty()) throw Error(ErrorCode::EmptyGroup, "no lead times");
    LeadTimeReport report;
    std::vector<double> all_real, all_synth;
    for (const auto& [reader, by_truth] : groups) {
        const auto& real = group_of(groups, reader, Truth::Real);
        const auto& synth = group_of(groups, reader, Truth::Synthetic);
        all_real.insert(all_real.end(), real.begin(), real.end());
        all_synth.insert(all_synth.end(), synth.begin(), synth.end());
    }
    for (const auto& [reader, by_truth] : groups) {
        const auto& real = group_of(groups, reader, Truth::Real);
        const auto& synth = group_of(groups, reader, Truth::Synthetic);
        ReaderLeadTime r;
        r.reader_id = reader;
        r.real = summarize(real);
        r.synthetic = summarize(synth);
        r.intra_p = rank_sum_test(real, synth).p_value;
        if (groups.size() > 1) {
            std::vector<double> others_real, others_synth;
            for (const auto& [other, other_truth] : groups) {
                if (other == reader) continue;
                const auto& orl = group_of(groups, other, Truth::Real);
                const auto& osy = group_of(groups, other, Truth::Synthetic);
                others_real.insert(others_real.end(), orl.begin(), orl.end());
                others_synth.insert(others_synth.end(), osy.begin(), osy.end());
            }
            r.inter_real_p = rank_sum_test(real, others_real).p_value;
            r.inter_synthetic_p = rank_sum_test(synth, others_synth).p_value;
        }
        report.readers.push_back(std::move(r));
    }
    report.pooled_real = summarize(all_real);
    report.pooled_synthetic = summarize(all_synth);
    return report;
}

}  // namespace histoprompt
