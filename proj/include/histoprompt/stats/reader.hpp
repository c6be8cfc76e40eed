#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "histoprompt/stats/responses.hpp"

namespace histoprompt {

/// Positive class = synthetic.
struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
};

/// A ratio with a zero denominator is reported as std::nullopt, never 0.
struct ReaderPerformance {
    std::string reader_id;
    Confusion confusion;
    double accuracy = 0.0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> ppv;
    std::optional<double> npv;
    double p_value = 1.0;
    double confidence = 0.0;  // fraction of "definitely" answers
};

ReaderPerformance performance_from_confusion(const Confusion& c, std::size_t definite_answers = 0);

/// Throws IncompleteResponses (no answers, mixed readers or a repeated item)
/// and SingleClassTruth.
ReaderPerformance reader_performance(const std::vector<ResponseRecord>& responses);

/// Groups by reader_id (sorted) and evaluates each reader.
std::vector<ReaderPerformance> all_reader_performance(const std::vector<ResponseRecord>& responses);

}  // namespace histoprompt
