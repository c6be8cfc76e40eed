#include "histoprompt/study/server.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "histoprompt/core/error.hpp"
#include "histoprompt/curation/image.hpp"

namespace histoprompt::study {

using nlohmann::json;

namespace {

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSession:
            return 404;
        case ErrorCode::DuplicateSession:
        case ErrorCode::OutOfOrder:
        case ErrorCode::AlreadyAnswered:
            return 409;
        case ErrorCode::IoFailure:
        case ErrorCode::DecodeError:
        case ErrorCode::UnsupportedImage:
            return 500;
        default:
            return 400;
    }
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", message}, {"code", code}}.dump(), "application/json");
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    }
    return body;
}

std::string string_field(const json& body, const char* key, bool required) {
    const auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        if (required) throw Error(ErrorCode::InvalidArgument, std::string("missing field ") + key);
        return {};
    }
    if (!it->is_string()) throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be a string");
    return it->get<std::string>();
}

template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            send_error(res, status_for(e.code()), to_string(e.code()), e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "InternalError", e.what());
        }
    };
}

}  // namespace

StudyServer::StudyServer(StudyStore& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

StudyServer::~StudyServer() { stop(); }

void StudyServer::install_routes() {
    auto& srv = *server_;
    const std::string study_id = store_.definition().study_id;

    srv.Post(R"(/api/studies/([^/]+)/sessions)", guarded([this, study_id](const auto& req, auto& res) {
                 if (req.matches[1] != study_id) {
                     send_error(res, 404, "UnknownStudy", "no study " + std::string(req.matches[1]));
                     return;
                 }
                 const auto body = parse_body(req);
                 std::optional<std::uint64_t> seed;
                 if (const auto it = body.find("seed"); it != body.end() && !it->is_null()) {
                     if (!it->is_number_unsigned()) throw Error(ErrorCode::InvalidArgument, "seed must be unsigned");
                     seed = it->template get<std::uint64_t>();
                 }
                 const auto s = store_.create_session(string_field(body, "reader_id", true), seed);
                 send_json(res, {{"session_id", s.session_id}}, 201);
             }));

    srv.Get(R"(/api/sessions/([^/]+)/next)", guarded([this](const auto& req, auto& res) {
                const std::string sid = req.matches[1];
                const auto next = store_.next_item(sid);
                if (std::holds_alternative<StudyComplete>(next)) {
                    send_json(res, {{"complete", true}});
                    return;
                }
                const auto& item = std::get<ServedItem>(next);
                send_json(res, {{"item_id", item.item_id},
                                {"image_url", "/img/" + sid + "/" + item.item_id + ".png"},
                                {"index", item.index},
                                {"total", item.total}});
            }));

    srv.Post(R"(/api/sessions/([^/]+)/responses)", guarded([this](const auto& req, auto& res) {
                 const auto body = parse_body(req);
                 store_.submit_response(req.matches[1], string_field(body, "item_id", true),
                                        string_field(body, "choice", true), string_field(body, "comment", false));
                 send_json(res, {{"accepted", true}});
             }));

    srv.Get(R"(/api/studies/([^/]+)/export)", guarded([this, study_id](const auto& req, auto& res) {
                if (req.matches[1] != study_id) {
                    send_error(res, 404, "UnknownStudy", "no study " + std::string(req.matches[1]));
                    return;
                }
                res.set_content(store_.export_csv(), "text/csv");
            }));

    srv.Get(R"(/img/([^/]+)/([^/]+)\.png)", guarded([this](const auto& req, auto& res) {
                const std::string sid = req.matches[1];
                const std::string item_id = req.matches[2];
                store_.session(sid);  // UnknownSession
                const auto current = store_.current_item(sid);
                if (!current || *current != item_id) {
                    send_error(res, 403, "NotCurrent", "image " + item_id + " is not on display");
                    return;
                }
                auto image = read_image(store_.definition().find(item_id)->image_path);
                if (image.width != kDisplaySize || image.height != kDisplaySize) {
                    image = resize_bilinear(image, kDisplaySize, kDisplaySize);
                }
                res.set_header("Cache-Control", "no-store");
                res.set_content(encode_png(image), "image/png");
            }));
}

int StudyServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool StudyServer::listen() { return server_->listen_after_bind(); }

void StudyServer::stop() {
    if (server_) server_->stop();
}

void StudyServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace histoprompt::study
