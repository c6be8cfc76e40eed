#include "histoprompt/stats/reader.hpp"

#include <set>
#include <string>

#include "histoprompt/core/error.hpp"
#include "histoprompt/stats/tests.hpp"

namespace histoprompt {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ReaderPerformance performance_from_confusion(const Confusion& c, std::size_t definite_answers) {
    const std::size_t n = c.total();
    if (n == 0) throw Error(ErrorCode::IncompleteResponses, "no responses");
    ReaderPerformance p;
    p.confusion = c;
    p.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
    p.sensitivity = ratio(c.tp, c.tp + c.fn);
    p.specificity = ratio(c.tn, c.tn + c.fp);
    p.ppv = ratio(c.tp, c.tp + c.fp);
    p.npv = ratio(c.tn, c.tn + c.fn);
    p.p_value = binomial_test(c.tp + c.tn, n, 0.5);
    p.confidence = static_cast<double>(definite_answers) / static_cast<double>(n);
    return p;
}

ReaderPerformance reader_performance(const std::vector<ResponseRecord>& responses) {
    if (responses.empty()) throw Error(ErrorCode::IncompleteResponses, "reader has no responses");
    const std::string& reader = responses.front().reader_id;
    std::set<std::string> items;
    Confusion c;
    std::size_t definite = 0;
    bool saw_real = false, saw_synth = false;
    for (const auto& r : responses) {
        if (r.reader_id != reader) {
            throw Error(ErrorCode::IncompleteResponses, "responses mix readers " + reader + " and " + r.reader_id);
        }
        if (!items.insert(r.item_id).second) {
            throw Error(ErrorCode::IncompleteResponses, "item " + r.item_id + " answered more than once by " + reader);
        }
        const bool called_synth = dichotomize(r.choice) == Truth::Synthetic;
        if (r.truth == Truth::Synthetic) {
            saw_synth = true;
            (called_synth ? c.tp : c.fn)++;
        } else {
            saw_real = true;
            (called_synth ? c.fp : c.tn)++;
        }
        if (is_definite(r.choice)) ++definite;
    }
    if (!saw_real || !saw_synth) {
        throw Error(ErrorCode::SingleClassTruth, "reader " + reader + " saw only one ground-truth class");
    }
    auto p = performance_from_confusion(c, definite);
    p.reader_id = reader;
    return p;
}

std::vector<ReaderPerformance> all_reader_performance(const std::vector<ResponseRecord>& responses) {
    std::map<std::string, std::vector<ResponseRecord>> by_reader;
    for (const auto& r : responses) by_reader[r.reader_id].push_back(r);
    std::vector<ReaderPerformance> out;
    for (const auto& [reader, list] : by_reader) out.push_back(reader_performance(list));
    return out;
}

}  // namespace histoprompt
