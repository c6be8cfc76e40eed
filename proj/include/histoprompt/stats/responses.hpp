#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace histoprompt {

enum class Truth { Real, Synthetic };
enum class Choice { DefinitelyReal, MaybeReal, MaybeSynthetic, DefinitelySynthetic };

std::string_view to_string(Truth t) noexcept;
std::string_view to_string(Choice c) noexcept;
/// Throws InvalidArgument.
Truth parse_truth(std::string_view text);
/// Throws InvalidChoice; there is deliberately no neutral option.
Choice parse_choice(std::string_view text);
std::optional<Choice> try_parse_choice(std::string_view text) noexcept;

/// Drops the confidence qualifier.
constexpr Truth dichotomize(Choice c) noexcept {
    return (c == Choice::DefinitelyReal || c == Choice::MaybeReal) ? Truth::Real : Truth::Synthetic;
}
constexpr bool is_definite(Choice c) noexcept {
    return c == Choice::DefinitelyReal || c == Choice::DefinitelySynthetic;
}

struct ResponseRecord {
    std::string reader_id;
    std::string item_id;
    Truth truth = Truth::Real;
    Choice choice = Choice::MaybeReal;
    double lead_time_s = 0.0;
    std::string comment;

    bool operator==(const ResponseRecord&) const = default;
};

inline constexpr std::string_view kResponsesCsvHeader = "reader_id,item_id,truth,choice,lead_time_s,comment";

/// RFC 4180: fields quoted when they contain a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);
/// Splits a CSV document into records; quoted fields may span lines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

void write_responses_csv(std::ostream& out, const std::vector<ResponseRecord>& records);
std::string responses_to_csv(const std::vector<ResponseRecord>& records);
/// Throws InvalidArgument on a bad header or row.
std::vector<ResponseRecord> responses_from_csv(std::string_view text);
std::vector<ResponseRecord> load_responses_csv(const std::filesystem::path& path);

}  // namespace histoprompt
