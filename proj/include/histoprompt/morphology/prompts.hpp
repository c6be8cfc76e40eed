#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace histoprompt {

enum class PromptStyle { Baseline, Enriched };
enum class IndexStyle { Words, Digits };

struct PromptOptions {
    IndexStyle index_style = IndexStyle::Words;
    /// Render cluster c as c + 1.
    bool one_based = false;
};

struct Prompt {
    std::string text;
    std::string label;
    std::optional<int> cluster;
    PromptStyle style = PromptStyle::Baseline;

    bool operator==(const Prompt&) const = default;
};

/// Lowercase English cardinal, hyphenated compounds ("twenty-one",
/// "one hundred five"). Valid for 0 <= n <= 999'999.
std::string cardinal_words(int n);

/// Inverse of cardinal_words; std::nullopt for text that is not a cardinal.
std::optional<int> parse_cardinal_words(std::string_view text);

/// "Histology image of {label} tissue" and, for enriched prompts,
/// ", morphology type {index}". Throws MissingCluster for an enriched prompt
/// without a cluster.
Prompt build_prompt(std::string_view label, std::optional<int> cluster, PromptStyle style,
                    const PromptOptions& options = {});

/// Parses a caption back into a Prompt. Throws MalformedPrompt.
Prompt parse_prompt(std::string_view text, const PromptOptions& options = {});

/// Enriched prompt -> baseline twin; baseline unchanged. Throws
/// MalformedPrompt when the text matches neither template.
Prompt strip_prompt(const Prompt& p, const PromptOptions& options = {});

}  // namespace histoprompt
