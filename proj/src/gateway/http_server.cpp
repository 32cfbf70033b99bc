#include "rosa/gateway/http_server.hpp"

#include "httplib.h"

namespace rosa::gateway {

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kNdjson = "application/x-ndjson";

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(canonical(body), kJson);
}

void fail(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    reply(res, status, {{"error", code}, {"message", message}});
}

Json body_of(const httplib::Request& req) {
    if (req.body.empty()) {
        return Json::object();
    }
    auto body = Json::parse(req.body);
    if (!body.is_object()) {
        throw std::invalid_argument("request body must be a JSON object");
    }
    return body;
}

// Maps service exceptions to HTTP errors.
template <class F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const UnknownSession& e) {
        fail(res, 404, "UnknownSession", e.what());
    } catch (const scenarios::UnknownScenario& e) {
        fail(res, 404, "UnknownScenario", e.what());
    } catch (const SessionBusy& e) {
        fail(res, 409, "SessionBusy", e.what());
    } catch (const agent::NoPendingConfirmation& e) {
        fail(res, 409, "NoPendingConfirmation", e.what());
    } catch (const agent::InvalidConfig& e) {
        fail(res, 400, "InvalidConfig", e.what());
    } catch (const Json::exception& e) {
        fail(res, 400, "BadRequest", e.what());
    } catch (const std::invalid_argument& e) {
        fail(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
        fail(res, 500, "Internal", e.what());
    }
}

// Streams events produced by `run` as newline-delimited JSON.
void stream(httplib::Response& res, std::function<void(const EventSink&)> run) {
    res.status = 200;
    res.set_chunked_content_provider(kNdjson, [run = std::move(run)](std::size_t, httplib::DataSink& sink) {
        run([&sink](const Json& event) {
            auto line = canonical(event) + "\n";
            sink.write(line.data(), line.size());
        });
        sink.done();
        return true;
    });
}

}  // namespace

HttpGateway::HttpGateway(SessionService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    routes();
}

HttpGateway::~HttpGateway() = default;

void HttpGateway::routes() {
    auto& svc = service_;
    server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server_->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    server_->Get("/scenarios", [&svc](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, {{"scenarios", svc.scenario_names()}});
    });

    server_->Post("/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto body = body_of(req);
            auto id = svc.create_session(body.at("scenario").get<std::string>(),
                                         body.value("config", Json::object()));
            reply(res, 201, {{"id", id}});
        });
    });

    server_->Get(R"(/sessions/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, svc.state(req.matches[1])); });
    });

    server_->Post(R"(/sessions/([^/]+)/messages)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto body = body_of(req);
            auto text = body.at("text").get<std::string>();
            std::optional<std::string> language;
            if (body.contains("language") && !body["language"].is_null()) {
                language = body["language"].get<std::string>();
            }
            // Taken now so a busy session is reported before streaming starts.
            auto lease = std::make_shared<SessionService::TurnLease>(svc.lease(req.matches[1]));
            stream(res, [&svc, lease, text, language](const EventSink& sink) {
                svc.post_message(std::move(*lease), text, language, sink);
            });
        });
    });

    server_->Post(R"(/sessions/([^/]+)/confirm)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto decision_text = body_of(req).at("decision").get<std::string>();
            if (decision_text != "approve" && decision_text != "deny") {
                throw std::invalid_argument("decision must be approve or deny");
            }
            const auto decision = decision_text == "approve" ? agent::Decision::Approve : agent::Decision::Deny;
            const std::string id = req.matches[1];
            auto lease = std::make_shared<SessionService::TurnLease>(svc.lease(id));
            if (svc.state(id).at("pending_confirmation").is_null()) {
                throw agent::NoPendingConfirmation();
            }
            stream(res, [&svc, lease, decision](const EventSink& sink) {
                svc.confirm(std::move(*lease), decision, sink);
            });
        });
    });

    server_->Post(R"(/sessions/([^/]+)/estop)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, {{"ack_tick", svc.estop(req.matches[1])}, {"estopped", true}}); });
    });

    server_->Post(R"(/sessions/([^/]+)/reset)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            svc.reset_estop(req.matches[1]);
            reply(res, 200, {{"estopped", false}});
        });
    });

    server_->Post(R"(/sessions/([^/]+)/override)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto body = body_of(req);
            auto result = svc.override_tool(req.matches[1], body.at("tool").get<std::string>(),
                                            body.value("args", Json::object()));
            if (const auto* ok = std::get_if<toolkit::ToolResult>(&result)) {
                reply(res, 200, {{"ok", true}, {"result", ok->payload}, {"text", ok->rendered_text}});
                return;
            }
            const auto& err = std::get<toolkit::ToolError>(result);
            int status = 422;
            if (err.code == "ArgValidation" || err.code == "UnknownTool" || err.code == "NotUplink") {
                status = 400;
            } else if (err.code == "EStopped") {
                status = 409;
            }
            reply(res, status, {{"ok", false}, {"error", err.code}, {"message", err.text()}});
        });
    });

    server_->Get(R"(/sessions/([^/]+)/transcript)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { res.set_content(svc.export_transcript(req.matches[1]), kNdjson); });
    });

    server_->Get(R"(/sessions/([^/]+)/metrics)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, svc.metrics(req.matches[1]).to_json()); });
    });
}

bool HttpGateway::listen(const std::string& host, int port) {
    return server_->listen(host, port);
}

int HttpGateway::bind_to_any_port(const std::string& host) {
    return server_->bind_to_any_port(host);
}

bool HttpGateway::listen_after_bind() {
    return server_->listen_after_bind();
}

void HttpGateway::stop() {
    server_->stop();
}

void HttpGateway::wait_until_ready() const {
    server_->wait_until_ready();
}

}  // namespace rosa::gateway
