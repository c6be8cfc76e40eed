#include "histoprompt/morphology/prompts.hpp"

#include <array>
#include <charconv>
#include <string>
#include <vector>

#include "histoprompt/core/error.hpp"

namespace histoprompt {

namespace {

constexpr std::array<std::string_view, 20> kOnes = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens = {"",      "",      "twenty",  "thirty", "forty",
                                                    "fifty", "sixty", "seventy", "eighty", "ninety"};

constexpr std::string_view kPrefix = "Histology image of ";
constexpr std::string_view kTissue = " tissue";
constexpr std::string_view kMorphology = ", morphology type ";

std::string below_thousand(int n) {
    std::string out;
    if (n >= 100) {
        out += kOnes[static_cast<std::size_t>(n / 100)];
        out += " hundred";
        n %= 100;
        if (n == 0) return out;
        out += ' ';
    }
    if (n < 20) {
        out += kOnes[static_cast<std::size_t>(n)];
    } else {
        out += kTens[static_cast<std::size_t>(n / 10)];
        if (n % 10 != 0) {
            out += '-';
            out += kOnes[static_cast<std::size_t>(n % 10)];
        }
    }
    return out;
}

int word_value(std::string_view w) {
    for (std::size_t i = 0; i < kOnes.size(); ++i) {
        if (kOnes[i] == w) return static_cast<int>(i);
    }
    for (std::size_t i = 2; i < kTens.size(); ++i) {
        if (kTens[i] == w) return static_cast<int>(i * 10);
    }
    return -1;
}

std::string index_text(int cluster, const PromptOptions& options) {
    const int shown = cluster + (options.one_based ? 1 : 0);
    return options.index_style == IndexStyle::Words ? cardinal_words(shown) : std::to_string(shown);
}

std::optional<int> parse_index(std::string_view text, const PromptOptions& options) {
    std::optional<int> value;
    if (options.index_style == IndexStyle::Words) {
        value = parse_cardinal_words(text);
    } else {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec == std::errc{} && ptr == text.data() + text.size() && std::to_string(v) == text) value = v;
    }
    if (!value) return std::nullopt;
    const int cluster = *value - (options.one_based ? 1 : 0);
    if (cluster < 0) return std::nullopt;
    return cluster;
}

}  // namespace

std::string cardinal_words(int n) {
    if (n < 0 || n > 999'999) throw Error(ErrorCode::InvalidArgument, "cardinal out of range: " + std::to_string(n));
    if (n < 1000) return below_thousand(n);
    std::string out = below_thousand(n / 1000) + " thousand";
    if (n % 1000 != 0) out += " " + below_thousand(n % 1000);
    return out;
}

std::optional<int> parse_cardinal_words(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::vector<std::string_view> words;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find(' ', start);
        const auto token = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (token.empty()) return std::nullopt;
        words.push_back(token);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    int total = 0;
    int group = 0;
    for (auto w : words) {
        if (w == "hundred") {
            group *= 100;
        } else if (w == "thousand") {
            total += group * 1000;
            group = 0;
        } else if (const auto dash = w.find('-'); dash != std::string_view::npos) {
            const int tens = word_value(w.substr(0, dash));
            const int ones = word_value(w.substr(dash + 1));
            if (tens < 20 || tens % 10 != 0 || ones < 1 || ones > 9) return std::nullopt;
            group += tens + ones;
        } else {
            const int v = word_value(w);
            if (v < 0) return std::nullopt;
            group += v;
        }
    }
    total += group;
    // Only the canonical spelling is accepted.
    if (total > 999'999 || cardinal_words(total) != text) return std::nullopt;
    return total;
}

Prompt build_prompt(std::string_view label, std::optional<int> cluster, PromptStyle style,
                    const PromptOptions& options) {
    Prompt p;
    p.label = std::string(label);
    p.style = style;
    p.text = std::string(kPrefix) + p.label + std::string(kTissue);
    if (style == PromptStyle::Enriched) {
        if (!cluster) throw Error(ErrorCode::MissingCluster, "enriched prompt for '" + p.label + "' needs a cluster");
        if (*cluster < 0) throw Error(ErrorCode::InvalidArgument, "cluster index must be >= 0");
        p.cluster = cluster;
        p.text += std::string(kMorphology) + index_text(*cluster, options);
    }
    return p;
}

Prompt parse_prompt(std::string_view text, const PromptOptions& options) {
    auto malformed = [&] { return Error(ErrorCode::MalformedPrompt, "'" + std::string(text) + "'"); };
    if (!text.starts_with(kPrefix)) throw malformed();
    const auto rest = text.substr(kPrefix.size());

    const std::string enriched_marker = std::string(kTissue) + std::string(kMorphology);
    if (const auto pos = rest.rfind(enriched_marker); pos != std::string_view::npos && pos > 0) {
        const auto label = rest.substr(0, pos);
        const auto index = parse_index(rest.substr(pos + enriched_marker.size()), options);
        if (!index) throw malformed();
        return build_prompt(label, *index, PromptStyle::Enriched, options);
    }
    if (rest.size() > kTissue.size() && rest.ends_with(kTissue)) {
        return build_prompt(rest.substr(0, rest.size() - kTissue.size()), std::nullopt, PromptStyle::Baseline, options);
    }
    throw malformed();
}

Prompt strip_prompt(const Prompt& p, const PromptOptions& options) {
    const Prompt parsed = parse_prompt(p.text, options);
    return build_prompt(parsed.label, std::nullopt, PromptStyle::Baseline, options);
}

}  // namespace histoprompt
