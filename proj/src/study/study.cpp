#include "histoprompt/study/study.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "histoprompt/core/error.hpp"
#include "histoprompt/core/random.hpp"

namespace histoprompt::study {

using nlohmann::json;

std::size_t StudyDefinition::count(Truth t) const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [t](const auto& i) { return i.truth == t; }));
}

const StudyItem* StudyDefinition::find(const std::string& item_id) const {
    for (const auto& item : items) {
        if (item.item_id == item_id) return &item;
    }
    return nullptr;
}

void StudyDefinition::check() const {
    if (items.empty()) throw Error(ErrorCode::InvalidArgument, "study has no items");
    std::vector<std::string> ids;
    for (const auto& i : items) ids.push_back(i.item_id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw Error(ErrorCode::InvalidArgument, "duplicate item id in study " + study_id);
    }
}

StudyDefinition load_study(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    StudyDefinition def;
    try {
        const auto j = json::parse(in);
        def.study_id = j.at("study_id").get<std::string>();
        def.seed = j.value("seed", std::uint64_t{0});
        for (const auto& item : j.at("items")) {
            StudyItem si;
            si.item_id = item.at("item_id").get<std::string>();
            si.image_path = item.at("image_path").get<std::string>();
            if (si.image_path.is_relative()) si.image_path = path.parent_path() / si.image_path;
            si.truth = parse_truth(item.at("truth").get<std::string>());
            def.items.push_back(std::move(si));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
    }
    def.check();
    return def;
}

void save_study(const StudyDefinition& def, const std::filesystem::path& path) {
    json items = json::array();
    for (const auto& i : def.items) {
        items.push_back({{"item_id", i.item_id}, {"image_path", i.image_path.string()}, {"truth", to_string(i.truth)}});
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << json{{"study_id", def.study_id}, {"seed", def.seed}, {"items", items}}.dump(2) << '\n';
}

StudyDefinition compose_study(std::string study_id, const std::vector<std::filesystem::path>& real_images,
                              const std::vector<std::filesystem::path>& synth_images, std::uint64_t seed,
                              std::size_t n_real, std::size_t n_synth) {
    if (real_images.size() < n_real || synth_images.size() < n_synth) {
        throw Error(ErrorCode::InsufficientData, "need " + std::to_string(n_real) + " real and " +
                                                     std::to_string(n_synth) + " synthetic images");
    }
    Rng rng(seed);
    std::vector<StudyItem> items;
    for (auto i : rng.sample_indices(real_images.size(), n_real)) items.push_back({"", real_images[i], Truth::Real});
    for (auto i : rng.sample_indices(synth_images.size(), n_synth)) items.push_back({"", synth_images[i], Truth::Synthetic});
    rng.shuffle(items);
    const int width = items.size() > 100 ? 3 : 2;
    for (std::size_t i = 0; i < items.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "item-%0*zu", width, i);
        items[i].item_id = buf;
    }
    StudyDefinition def;
    def.study_id = std::move(study_id);
    def.seed = seed;
    def.items = std::move(items);
    return def;
}

Clock system_clock() {
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
            .count();
    };
}

StudyStore::StudyStore(StudyDefinition definition, std::filesystem::path log_path, Clock clock)
    : def_(std::move(definition)), log_path_(std::move(log_path)), clock_(std::move(clock)) {
    def_.check();
    replay();
}

void StudyStore::append(const std::string& line) {
    const std::string data = line + "\n";
    const int fd = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(ErrorCode::IoFailure, "cannot open " + log_path_.string() + ": " + std::strerror(errno));
    // One write() per line; O_APPEND makes it land whole at the end.
    const ssize_t written = ::write(fd, data.data(), data.size());
    ::close(fd);
    if (written != static_cast<ssize_t>(data.size())) {
        throw Error(ErrorCode::IoFailure, "short write to " + log_path_.string());
    }
}

void StudyStore::replay() {
    std::ifstream in(log_path_, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            // A torn final line from a crash is dropped; anything earlier is corruption.
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw Error(ErrorCode::IoFailure, log_path_.string() + ":" + std::to_string(n) + ": corrupt log line");
        }
        const auto event = j.at("event").get<std::string>();
        if (event == "session") {
            Session s;
            s.session_id = j.at("session_id").get<std::string>();
            s.reader_id = j.at("reader_id").get<std::string>();
            s.seed = j.at("seed").get<std::uint64_t>();
            s.item_order = j.at("order").get<std::vector<std::string>>();
            session_by_reader_[s.reader_id] = s.session_id;
            sessions_[s.session_id] = std::move(s);
            ++next_session_number_;
        } else if (event == "served") {
            auto& s = sessions_.at(j.at("session_id").get<std::string>());
            s.served_at = j.at("served_at").get<std::int64_t>();
            s.last_served_at = *s.served_at;
        } else if (event == "response") {
            auto& s = sessions_.at(j.at("session_id").get<std::string>());
            ResponseRecord r;
            r.reader_id = s.reader_id;
            r.item_id = j.at("item_id").get<std::string>();
            const auto* item = def_.find(r.item_id);
            if (!item) throw Error(ErrorCode::IoFailure, "log references unknown item " + r.item_id);
            r.truth = item->truth;
            r.choice = parse_choice(j.at("choice").get<std::string>());
            r.lead_time_s = j.at("lead_time_s").get<double>();
            r.comment = j.value("comment", std::string{});
            log_.emplace_back(s.session_id, std::move(r));
            ++s.cursor;
            s.served_at.reset();
        }
    }
}

Session StudyStore::create_session(const std::string& reader_id, std::optional<std::uint64_t> seed) {
    if (reader_id.empty()) throw Error(ErrorCode::InvalidArgument, "reader_id must not be empty");
    std::lock_guard lock(mu_);
    if (session_by_reader_.contains(reader_id)) {
        throw Error(ErrorCode::DuplicateSession, "reader " + reader_id + " already has session " +
                                                     session_by_reader_.at(reader_id));
    }
    Session s;
    s.reader_id = reader_id;
    s.seed = seed.value_or(def_.seed ^ fnv1a(reader_id));
    for (const auto& item : def_.items) s.item_order.push_back(item.item_id);
    Rng rng(s.seed);
    rng.shuffle(s.item_order);
    char id[40];
    std::snprintf(id, sizeof id, "s%016llx",
                  static_cast<unsigned long long>(derive_seed(def_.seed, fnv1a(reader_id), next_session_number_)));
    s.session_id = id;

    append(json{{"event", "session"},
                {"session_id", s.session_id},
                {"reader_id", s.reader_id},
                {"seed", s.seed},
                {"order", s.item_order},
                {"at", clock_()}}
               .dump());
    ++next_session_number_;
    session_by_reader_[reader_id] = s.session_id;
    sessions_[s.session_id] = s;
    return s;
}

NextResult StudyStore::next_item(const std::string& session_id) {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, session_id);
    auto& s = it->second;
    if (s.complete()) return StudyComplete{};
    if (!s.served_at) {
        const std::int64_t now = std::max(clock_(), s.last_served_at);
        append(json{{"event", "served"},
                    {"session_id", s.session_id},
                    {"item_id", s.item_order[s.cursor]},
                    {"served_at", now}}
                   .dump());
        s.served_at = now;
        s.last_served_at = now;
    }
    return ServedItem{s.item_order[s.cursor], s.cursor, s.item_order.size(), *s.served_at};
}

ResponseRecord StudyStore::submit_response(const std::string& session_id, const std::string& item_id,
                                           const std::string& choice, const std::string& comment) {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, session_id);
    auto& s = it->second;
    if (s.cursor > 0 && s.item_order[s.cursor - 1] == item_id) {
        throw Error(ErrorCode::AlreadyAnswered, "item " + item_id + " was already answered");
    }
    if (s.complete() || s.item_order[s.cursor] != item_id || !s.served_at) {
        throw Error(ErrorCode::OutOfOrder, "item " + item_id + " is not the item currently on display");
    }
    const Choice parsed = parse_choice(choice);

    const std::int64_t received = clock_();
    ResponseRecord r;
    r.reader_id = s.reader_id;
    r.item_id = item_id;
    r.truth = def_.find(item_id)->truth;
    r.choice = parsed;
    r.lead_time_s = static_cast<double>(std::max<std::int64_t>(0, received - *s.served_at)) / 1000.0;
    r.comment = comment;
    append(json{{"event", "response"},
                {"session_id", s.session_id},
                {"item_id", item_id},
                {"choice", to_string(parsed)},
                {"comment", comment},
                {"lead_time_s", r.lead_time_s},
                {"received_at", received}}
               .dump());
    log_.emplace_back(s.session_id, r);
    ++s.cursor;
    s.served_at.reset();
    return r;
}

std::optional<std::string> StudyStore::current_item(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end() || it->second.complete() || !it->second.served_at) return std::nullopt;
    return it->second.item_order[it->second.cursor];
}

Session StudyStore::session(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, session_id);
    return it->second;
}

std::vector<Session> StudyStore::sessions() const {
    std::lock_guard lock(mu_);
    std::vector<Session> out;
    for (const auto& [id, s] : sessions_) out.push_back(s);
    return out;
}

std::vector<ResponseRecord> StudyStore::responses() const {
    std::lock_guard lock(mu_);
    std::vector<ResponseRecord> out;
    out.reserve(log_.size());
    for (const auto& [sid, r] : log_) out.push_back(r);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.reader_id < b.reader_id; });
    return out;
}

std::string StudyStore::export_csv() const { return responses_to_csv(responses()); }

void StudyStore::export_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << export_csv();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace histoprompt::study
