#include "histoprompt/stats/responses.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "histoprompt/core/error.hpp"

namespace histoprompt {

std::string_view to_string(Truth t) noexcept { return t == Truth::Real ? "real" : "synthetic"; }

std::string_view to_string(Choice c) noexcept {
    switch (c) {
        case Choice::DefinitelyReal: return "definitely_real";
        case Choice::MaybeReal: return "maybe_real";
        case Choice::MaybeSynthetic: return "maybe_synthetic";
        case Choice::DefinitelySynthetic: return "definitely_synthetic";
    }
    return "unknown";
}

Truth parse_truth(std::string_view text) {
    if (text == "real") return Truth::Real;
    if (text == "synthetic") return Truth::Synthetic;
    throw Error(ErrorCode::InvalidArgument, "truth must be 'real' or 'synthetic', got '" + std::string(text) + "'");
}

std::optional<Choice> try_parse_choice(std::string_view text) noexcept {
    for (auto c : {Choice::DefinitelyReal, Choice::MaybeReal, Choice::MaybeSynthetic, Choice::DefinitelySynthetic}) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

Choice parse_choice(std::string_view text) {
    if (auto c = try_parse_choice(text)) return *c;
    throw Error(ErrorCode::InvalidChoice, "'" + std::string(text) +
                                              "' is not one of definitely_real, maybe_real, maybe_synthetic, "
                                              "definitely_synthetic");
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                field_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                field_started = false;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (quoted) throw Error(ErrorCode::InvalidArgument, "unterminated quoted CSV field");
    if (field_started || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_responses_csv(std::ostream& out, const std::vector<ResponseRecord>& records) {
    out << kResponsesCsvHeader << "\r\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.3f", r.lead_time_s);
        out << csv_escape(r.reader_id) << ',' << csv_escape(r.item_id) << ',' << to_string(r.truth) << ','
            << to_string(r.choice) << ',' << buf << ',' << csv_escape(r.comment) << "\r\n";
    }
}

std::string responses_to_csv(const std::vector<ResponseRecord>& records) {
    std::ostringstream out;
    write_responses_csv(out, records);
    return out.str();
}

std::vector<ResponseRecord> responses_from_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    const auto rows = parse_csv(text);
    if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "responses CSV is empty");
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
    if (header != kResponsesCsvHeader) {
        throw Error(ErrorCode::InvalidArgument, "unexpected header '" + header + "'");
    }
    std::vector<ResponseRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 6) {
            throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                                                        " fields, expected 6");
        }
        ResponseRecord r;
        r.reader_id = row[0];
        r.item_id = row[1];
        r.truth = parse_truth(row[2]);
        r.choice = parse_choice(row[3]);
        double t = 0.0;
        const auto [ptr, ec] = std::from_chars(row[4].data(), row[4].data() + row[4].size(), t);
        if (ec != std::errc{} || ptr != row[4].data() + row[4].size() || !std::isfinite(t) || t < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(i + 1) + ": bad lead_time_s '" + row[4] + "'");
        }
        r.lead_time_s = t;
        r.comment = row[5];
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ResponseRecord> load_responses_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return responses_from_csv(text);
}

}  // namespace histoprompt
