#include "rosa/gateway/repl.hpp"

#include "rosa/kv_file.hpp"

#include <istream>
#include <ostream>

namespace rosa::gateway {

std::string render_event(const Json& event) {
    const auto kind = event.value("kind", "");
    if (kind == "reasoning") {
        const auto text = event.value("text", "");
        return text.empty() ? "" : "[reasoning] " + text;
    }
    if (kind == "action") {
        return "[action] " + event.value("tool", "") + " " + canonical(event.at("args"));
    }
    if (kind == "observation") {
        return "[observation] " + event.value("tool", "") + ": " + event.value("content", "");
    }
    if (kind == "final") {
        std::string out = "ROSA: " + event.value("text", "");
        const auto& p = event.at("pending_confirmation");
        if (!p.is_null()) {
            out += "\n[confirm] " + p.at("tool").get<std::string>() + " " + canonical(p.at("args")) +
                   " is waiting for approval; type /confirm or /deny";
        }
        return out;
    }
    if (kind == "error") {
        return "[error] " + event.value("error", "") + ": " + event.value("message", "");
    }
    return canonical(event);
}

namespace {

bool print_events(const std::vector<Json>& events, std::ostream& out) {
    bool failed = false;
    for (const auto& e : events) {
        if (auto line = render_event(e); !line.empty()) {
            out << line << '\n';
        }
        failed = failed || (e.value("kind", "") == "error" && e.value("error", "") == "ModelBackendUnavailable");
    }
    out.flush();
    return failed;
}

}  // namespace

int run_repl(SessionService& service, const std::string& id, std::istream& in, std::ostream& out,
             const std::optional<std::string>& language) {
    std::string line;
    while (out << "> " << std::flush, std::getline(in, line)) {
        auto text = std::string(trim(line));
        if (text.empty()) {
            continue;
        }
        try {
            if (text == "/quit" || text == "/exit") {
                return 0;
            }
            if (text == "/confirm" || text == "/deny") {
                auto events = service.confirm(id, text == "/confirm" ? agent::Decision::Approve : agent::Decision::Deny);
                if (print_events(events, out)) {
                    return 2;
                }
            } else if (text == "/estop") {
                out << "[safety] e-stop engaged at tick " << service.estop(id) << '\n';
            } else if (text == "/reset") {
                service.reset_estop(id);
                out << "[safety] e-stop cleared\n";
            } else if (text == "/metrics") {
                out << canonical(service.metrics(id).to_json()) << '\n';
            } else if (text.rfind("/override", 0) == 0) {
                auto rest = std::string(trim(std::string_view(text).substr(9)));
                auto space = rest.find(' ');
                auto tool = rest.substr(0, space);
                Json args = space == std::string::npos ? Json::object() : Json::parse(rest.substr(space + 1));
                auto result = service.override_tool(id, tool, args);
                if (const auto* ok = std::get_if<toolkit::ToolResult>(&result)) {
                    out << "[override] " << tool << ": " << ok->rendered_text << '\n';
                } else {
                    out << "[override] " << tool << " refused: " << std::get<toolkit::ToolError>(result).text() << '\n';
                }
            } else if (text[0] == '/') {
                out << "unknown command " << text << "; try /confirm /deny /estop /reset /override /metrics /quit\n";
            } else if (print_events(service.post_message(id, text, language), out)) {
                return 2;
            }
        } catch (const Json::exception& e) {
            out << "[error] bad JSON: " << e.what() << '\n';
        } catch (const std::exception& e) {
            out << "[error] " << e.what() << '\n';
        }
    }
    return 0;
}

}  // namespace rosa::gateway
