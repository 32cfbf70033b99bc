#include "rosa/toolkit/tool.hpp"

#include "rosa/toolkit/blacklist.hpp"

#include <algorithm>
#include <thread>

namespace rosa::toolkit {

std::string_view to_string(Direction direction) {
    return direction == Direction::Uplink ? "uplink" : "downlink";
}

const ParamSpec* ToolSpec::param(std::string_view name) const {
    for (const auto& p : params) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

ToolResult ToolResult::from(Json payload) {
    ToolResult r;
    r.rendered_text = canonical(payload);
    r.payload = std::move(payload);
    return r;
}

std::string ToolError::text() const {
    return code + ": " + message;
}

void ToolContext::actuate(const std::function<void()>& effect) {
    if (gate != nullptr) {
        gate->actuate(effect);
        return;
    }
    if (stop.stop_requested()) {
        throw Cancelled("cancelled before actuation");
    }
    effect();
}

void ToolContext::delay(std::uint64_t ticks) {
    using namespace std::chrono;
    for (std::uint64_t i = 0; i < ticks; ++i) {
        if (stop.stop_requested()) {
            return;
        }
        ++elapsed_ticks;
        if (tick_duration.count() > 0) {
            std::this_thread::sleep_for(tick_duration);
        }
    }
}

Blacklist::Blacklist(std::vector<std::string> entries) : entries_(std::move(entries)) {}

bool Blacklist::matches(std::string_view name) const {
    for (const auto& entry : entries_) {
        if (!entry.empty() && entry.back() == '*') {
            const std::string_view prefix(entry.data(), entry.size() - 1);
            if (name.substr(0, prefix.size()) == prefix) {
                return true;
            }
        } else if (entry == name) {
            return true;
        }
    }
    return false;
}

Blacklist Blacklist::merge(const Blacklist& a, const Blacklist& b) {
    std::vector<std::string> out = a.entries_;
    for (const auto& e : b.entries_) {
        if (std::find(out.begin(), out.end(), e) == out.end()) {
            out.push_back(e);
        }
    }
    return Blacklist(std::move(out));
}

Blacklist Blacklist::from_json(const Json& list) {
    std::vector<std::string> out;
    if (list.is_array()) {
        for (const auto& item : list) {
            if (item.is_string()) {
                out.push_back(item.get<std::string>());
            }
        }
    }
    return Blacklist(std::move(out));
}

}  // namespace rosa::toolkit
