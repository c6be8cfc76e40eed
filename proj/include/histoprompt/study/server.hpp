#pragma once

#include <memory>
#include <string>

#include "histoprompt/study/study.hpp"

namespace httplib {
class Server;
}

namespace histoprompt::study {

inline constexpr int kDisplaySize = 512;

/// HTTP/JSON front of a StudyStore.
///
///   POST /api/studies/{sid}/sessions      {reader_id, seed?} -> {session_id}
///   GET  /api/sessions/{id}/next          -> {item_id, image_url, index, total} | {complete: true}
///   POST /api/sessions/{id}/responses     {item_id, choice, comment?} -> {accepted: true}
///   GET  /api/studies/{sid}/export        -> text/csv
///   GET  /img/{session_id}/{item_id}.png  current item only, upscaled to 512x512
///
/// Errors are {error, code} with a 4xx status.
class StudyServer {
  public:
    explicit StudyServer(StudyStore& store);
    ~StudyServer();

    StudyServer(const StudyServer&) = delete;
    StudyServer& operator=(const StudyServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool listen();
    void stop();
    void wait_until_ready() const;

  private:
    void install_routes();

    StudyStore& store_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace histoprompt::study
