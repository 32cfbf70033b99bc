#include "rosa/agent/parse.hpp"

#include <map>
#include <set>

namespace rosa::agent {

namespace {

std::string_view trim_view(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

Malformed malformed(std::string what, std::size_t position) {
    return Malformed{std::move(what), position};
}

}  // namespace

std::size_t ToolCallBatch::call_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) {
        n += g.size();
    }
    return n;
}

std::vector<ToolCall> ToolCallBatch::calls() const {
    std::vector<ToolCall> out;
    for (const auto& g : groups) {
        out.insert(out.end(), g.begin(), g.end());
    }
    return out;
}

ParsedOutput parse_model_output(std::string_view raw) {
    const auto text = trim_view(raw);
    const bool mentions_calls = text.find("\"tool_calls\"") != std::string_view::npos;
    if (text.empty() || text.front() != '{') {
        return FinalAnswer{std::string(raw)};
    }

    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        if (!mentions_calls) {
            return FinalAnswer{std::string(raw)};
        }
        return malformed("tool-call record is not valid JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                         e.byte);
    }
    if (!doc.is_object() || !doc.contains("tool_calls")) {
        return FinalAnswer{std::string(raw)};
    }

    const auto& list = doc["tool_calls"];
    if (!list.is_array() || list.empty()) {
        return malformed("\"tool_calls\" must be a non-empty array", 0);
    }

    ToolCallBatch batch;
    if (auto it = doc.find("reasoning"); it != doc.end()) {
        if (!it->is_string()) {
            return malformed("\"reasoning\" must be a string", 0);
        }
        batch.reasoning = it->get<std::string>();
    }

    std::map<int, std::vector<ToolCall>> by_group;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& rec = list[i];
        const std::string where = "tool_calls[" + std::to_string(i) + "]";
        if (!rec.is_object()) {
            return malformed(where + " is not an object", i);
        }
        ToolCall call;
        if (!rec.contains("id") || !rec["id"].is_string() || rec["id"].get<std::string>().empty()) {
            return malformed(where + " needs a non-empty string \"id\"", i);
        }
        call.id = rec["id"].get<std::string>();
        if (!seen.insert(call.id).second) {
            return malformed(where + " repeats call id \"" + call.id + "\"", i);
        }
        if (!rec.contains("name") || !rec["name"].is_string() || rec["name"].get<std::string>().empty()) {
            return malformed(where + " needs a non-empty string \"name\"", i);
        }
        call.name = rec["name"].get<std::string>();
        if (rec.contains("args")) {
            if (!rec["args"].is_object()) {
                return malformed(where + " \"args\" must be an object", i);
            }
            call.args = rec["args"];
        }
        if (rec.contains("group")) {
            const auto& g = rec["group"];
            if (!g.is_number_integer() || g.get<long long>() < 0 || g.get<long long>() > 1'000'000) {
                return malformed(where + " \"group\" must be a non-negative integer", i);
            }
            call.group = g.get<int>();
        }
        for (const auto& [key, value] : rec.items()) {
            if (key != "id" && key != "name" && key != "args" && key != "group") {
                return malformed(where + " has unexpected key \"" + key + "\"", i);
            }
        }
        by_group[call.group].push_back(std::move(call));
    }
    for (auto& [group, calls] : by_group) {
        batch.groups.push_back(std::move(calls));
    }
    return batch;
}

std::string to_wire(const ToolCallBatch& batch) {
    Json calls = Json::array();
    for (const auto& group : batch.groups) {
        for (const auto& c : group) {
            calls.push_back({{"id", c.id}, {"group", c.group}, {"name", c.name}, {"args", c.args}});
        }
    }
    Json doc = {{"tool_calls", std::move(calls)}};
    if (!batch.reasoning.empty()) {
        doc["reasoning"] = batch.reasoning;
    }
    return canonical(doc);
}

std::string observation_result(std::string_view call_id, const Json& result) {
    return canonical(Json{{"id", call_id}, {"result", result}});
}

std::string observation_error(std::string_view call_id, std::string_view error) {
    return canonical(Json{{"error", error}, {"id", call_id}});
}

}  // namespace rosa::agent
