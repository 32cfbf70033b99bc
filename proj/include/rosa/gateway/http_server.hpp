#pragma once

#include "rosa/gateway/session_service.hpp"

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace rosa::gateway {

// JSON over HTTP for the console:
//
//   GET  /scenarios
//   POST /sessions                  {"scenario", "config"?} -> {"id"}
//   GET  /sessions/{id}             safety and robot state
//   POST /sessions/{id}/messages    {"text", "language"?} -> NDJSON event stream
//   POST /sessions/{id}/confirm     {"decision": "approve"|"deny"} -> NDJSON event stream
//   POST /sessions/{id}/estop       -> {"ack_tick"}
//   POST /sessions/{id}/reset       clears a latched e-stop
//   POST /sessions/{id}/override    {"tool", "args"} -> {"ok", "result"|"error"}
//   GET  /sessions/{id}/transcript  JSONL
//   GET  /sessions/{id}/metrics
//
// Errors are {"error": code, "message": text} with a matching status.
class HttpGateway {
public:
    explicit HttpGateway(SessionService& service);
    ~HttpGateway();

    // Blocks until stop().
    bool listen(const std::string& host, int port);
    // Returns the chosen port, or -1.
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    void routes();

    SessionService& service_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace rosa::gateway
