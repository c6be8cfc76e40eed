#pragma once

#include <map>
#include <string>
#include <vector>

#include "histoprompt/stats/responses.hpp"

namespace histoprompt {

struct GroupSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample sd
    double ks_statistic = 0.0;
    double ks_p_value = 1.0;
};

struct ReaderLeadTime {
    std::string reader_id;
    GroupSummary real;
    GroupSummary synthetic;
    double intra_p = 1.0;       // real vs synthetic, same reader
    double inter_real_p = 1.0;  // this reader vs pooled others, real items
    double inter_synthetic_p = 1.0;
};

struct LeadTimeReport {
    std::vector<ReaderLeadTime> readers;
    GroupSummary pooled_real;
    GroupSummary pooled_synthetic;
};

/// reader -> (truth -> seconds)
using LeadTimeGroups = std::map<std::string, std::map<Truth, std::vector<double>>>;

LeadTimeGroups group_lead_times(const std::vector<ResponseRecord>& responses);

/// Throws EmptyGroup when a reader lacks one truth class. Inter-reader
/// p-values are 1 when there is only one reader.
LeadTimeReport leadtime_analysis(const LeadTimeGroups& groups);

}  // namespace histoprompt
