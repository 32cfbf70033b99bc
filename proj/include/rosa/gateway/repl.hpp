#pragma once

#include "rosa/gateway/session_service.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace rosa::gateway {

// Renders one stream event as a terminal line ("" for nothing to show).
std::string render_event(const Json& event);

// Line-oriented chat with one session. Meta-commands:
//   /confirm  /deny  /estop  /reset  /override <tool> <json>  /metrics  /quit
// Returns 0 on /quit or end of input, 2 after a model backend failure.
int run_repl(SessionService& service, const std::string& session_id, std::istream& in, std::ostream& out,
             const std::optional<std::string>& language = std::nullopt);

}  // namespace rosa::gateway
