#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "histoprompt/stats/responses.hpp"

namespace histoprompt::study {

struct StudyItem {
    std::string item_id;
    std::filesystem::path image_path;
    Truth truth = Truth::Real;
};

struct StudyDefinition {
    std::string study_id;
    std::vector<StudyItem> items;
    std::uint64_t seed = 0;

    std::size_t count(Truth t) const;
    const StudyItem* find(const std::string& item_id) const;

    /// Throws InvalidArgument on duplicate item ids or an empty item list.
    void check() const;
};

/// JSON {"study_id", "seed", "items": [{"item_id", "image_path", "truth"}]};
/// relative image paths are resolved against the definition's directory.
StudyDefinition load_study(const std::filesystem::path& path);
void save_study(const StudyDefinition& def, const std::filesystem::path& path);

/// Builds a study with `n_real` + `n_synth` items drawn from two image
/// lists (default 20 + 20). Item ids are opaque ("item-00".."item-39"),
/// assigned after a seeded shuffle so they do not reveal the truth.
StudyDefinition compose_study(std::string study_id, const std::vector<std::filesystem::path>& real_images,
                              const std::vector<std::filesystem::path>& synth_images, std::uint64_t seed,
                              std::size_t n_real = 20, std::size_t n_synth = 20);

/// Milliseconds since the Unix epoch. Injectable for tests.
using Clock = std::function<std::int64_t()>;
Clock system_clock();

struct Session {
    std::string session_id;
    std::string reader_id;
    std::uint64_t seed = 0;
    std::vector<std::string> item_order;
    std::size_t cursor = 0;
    /// Served timestamp of the item at `cursor`, once served.
    std::optional<std::int64_t> served_at;
    std::int64_t last_served_at = 0;

    bool complete() const noexcept { return cursor >= item_order.size(); }
};

/// Reader-facing view of the current item. Carries no truth.
struct ServedItem {
    std::string item_id;
    std::size_t index = 0;  // 0-based position
    std::size_t total = 0;
    std::int64_t served_at = 0;
};
struct StudyComplete {};
using NextResult = std::variant<ServedItem, StudyComplete>;

/// Session state and the append-only event log for one study. Every state
/// change is written to the log (one JSON object per line) before it becomes
/// visible; the log is replayed on construction. Thread-safe.
class StudyStore {
  public:
    StudyStore(StudyDefinition definition, std::filesystem::path log_path, Clock clock = system_clock());

    const StudyDefinition& definition() const noexcept { return def_; }

    /// Throws DuplicateSession when the reader already has a session.
    Session create_session(const std::string& reader_id, std::optional<std::uint64_t> seed = std::nullopt);

    /// Throws UnknownSession.
    NextResult next_item(const std::string& session_id);

    /// Throws UnknownSession, InvalidChoice, AlreadyAnswered (the item just
    /// answered, i.e. a repeated submit) and OutOfOrder (any other item that
    /// is not the current one, including one not yet served).
    ResponseRecord submit_response(const std::string& session_id, const std::string& item_id,
                                   const std::string& choice, const std::string& comment = {});

    /// Current item of the session, if it has been served and not answered.
    std::optional<std::string> current_item(const std::string& session_id) const;

    Session session(const std::string& session_id) const;
    std::vector<Session> sessions() const;

    /// All accepted responses sorted by (reader_id, answer order).
    std::vector<ResponseRecord> responses() const;
    std::string export_csv() const;
    void export_csv(const std::filesystem::path& path) const;

  private:
    void replay();
    void append(const std::string& line);

    StudyDefinition def_;
    std::filesystem::path log_path_;
    Clock clock_;
    mutable std::mutex mu_;
    std::map<std::string, Session> sessions_;
    std::map<std::string, std::string> session_by_reader_;
    std::vector<std::pair<std::string, ResponseRecord>> log_;  // (session_id, record) in arrival order
    std::size_t next_session_number_ = 1;
};

}  // namespace histoprompt::study
