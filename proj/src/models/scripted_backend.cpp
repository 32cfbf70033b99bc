#include "rosa/models/scripted_backend.hpp"

#include "rosa/agent/parse.hpp"

#include <cmath>
#include <map>

namespace rosa::models {

namespace {

using agent::Message;
using agent::Role;

class TemplateError : public ModelError {
public:
    explicit TemplateError(const std::string& what) : ModelError("TemplateError", what) {}
};

Json parse_or_string(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error&) {
        return text;
    }
}

// What the script can see of a request.
struct View {
    std::vector<Json> trailing;       // latest observations, tool name added
    std::string tool_text;            // "<tool> <content>" per line
    std::optional<std::string> user;  // set when the user spoke last
    std::string last_answer;
    int step = 1;
    std::map<std::string, Json> latest_by_tool;
};

std::string render_value(const Json& v);

// "<result>" or "error <message>", strings unquoted.
std::string observation_text(const Json& obs) {
    if (obs.contains("error")) {
        return "error " + render_value(obs["error"]);
    }
    if (obs.contains("result")) {
        return render_value(obs["result"]);
    }
    return canonical(obs);
}

View make_view(const std::vector<Message>& messages) {
    View view;
    std::map<std::string, std::string> call_names;
    std::size_t last_user = messages.size();
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& m = messages[i];
        if (m.role == Role::User) {
            last_user = i;
        } else if (m.role == Role::Assistant) {
            auto parsed = agent::parse_model_output(m.content);
            if (const auto* batch = std::get_if<agent::ToolCallBatch>(&parsed)) {
                for (const auto& c : batch->calls()) {
                    call_names[c.id] = c.name;
                }
            } else {
                view.last_answer = m.content;
            }
        } else if (m.role == Role::Tool) {
            Json obs = parse_or_string(m.content);
            if (!obs.is_object()) {
                obs = Json{{"content", obs}};
            }
            std::string name;
            if (obs.contains("id") && obs["id"].is_string()) {
                if (auto it = call_names.find(obs["id"].get<std::string>()); it != call_names.end()) {
                    name = it->second;
                }
            }
            obs["tool"] = name;
            view.latest_by_tool[name] = obs;
        }
    }
    if (last_user < messages.size()) {
        for (std::size_t i = last_user + 1; i < messages.size(); ++i) {
            if (messages[i].role == Role::Assistant) {
                ++view.step;
            }
        }
    }

    std::size_t first_tool = messages.size();
    while (first_tool > 0 && messages[first_tool - 1].role == Role::Tool) {
        --first_tool;
    }
    if (first_tool < messages.size()) {
        for (std::size_t i = first_tool; i < messages.size(); ++i) {
            Json obs = parse_or_string(messages[i].content);
            if (!obs.is_object()) {
                obs = Json{{"content", obs}};
            }
            std::string name;
            if (obs.contains("id") && obs["id"].is_string()) {
                if (auto it = call_names.find(obs["id"].get<std::string>()); it != call_names.end()) {
                    name = it->second;
                }
            }
            obs["tool"] = name;
            if (!view.tool_text.empty()) {
                view.tool_text += '\n';
            }
            view.tool_text += name + " " + observation_text(obs);
            view.trailing.push_back(std::move(obs));
        }
    } else if (!messages.empty() && messages.back().role == Role::User) {
        view.user = messages.back().content;
    }
    return view;
}

bool search(const std::regex& re, const std::string& text, std::vector<std::string>& captures) {
    std::smatch m;
    if (!std::regex_search(text, m, re)) {
        return false;
    }
    for (std::size_t g = 1; g < m.size(); ++g) {
        captures.push_back(m[g].matched ? m[g].str() : std::string());
    }
    return true;
}

bool matches(const ScriptRule& rule, const View& view, std::vector<std::string>& captures) {
    using K = ScriptRule::TriggerKind;
    for (const auto& t : rule.triggers) {
        switch (t.kind) {
            case K::Any:
                break;
            case K::Step:
                if (view.step != t.step) {
                    return false;
                }
                break;
            case K::User:
                if (!view.user || !search(t.regex, *view.user, captures)) {
                    return false;
                }
                break;
            case K::Tool:
                if (view.trailing.empty() || !search(t.regex, view.tool_text, captures)) {
                    return false;
                }
                break;
            case K::Assistant:
                if (!search(t.regex, view.last_answer, captures)) {
                    return false;
                }
                break;
        }
    }
    return true;
}

std::string render_value(const Json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number()) {
        return format_number(v.get<double>());
    }
    return canonical(v);
}

Json at_pointer(const Json& doc, const std::string& ptr) {
    try {
        return doc.at(Json::json_pointer(ptr));
    } catch (const Json::exception& e) {
        throw TemplateError("no value at " + ptr + ": " + e.what());
    }
}

class Renderer {
public:
    Renderer(const View& view, std::vector<std::string> captures) : view_(view), captures_(std::move(captures)) {}

    std::string operator()(std::string_view tmpl, double i = 0, bool text = false) const {
        std::string out = substitute(tmpl);
        out = expressions(out, i);
        return text ? unescape(out) : out;
    }

private:
    std::string lookup(const std::string& key) const {
        if (!key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            const auto n = std::stoul(key);
            if (n == 0 || n > captures_.size()) {
                throw TemplateError("no capture group " + key);
            }
            return captures_[n - 1];
        }
        if (key.front() == '/') {
            return render_value(at_pointer(trailing(), key));
        }
        if (key.rfind("list:", 0) == 0) {
            const auto v = at_pointer(trailing(), key.substr(5));
            if (!v.is_array()) {
                throw TemplateError(key + " is not a list");
            }
            std::string out;
            for (const auto& item : v) {
                if (!out.empty()) {
                    out += '\n';
                }
                out += "- " + render_value(item);
            }
            return out;
        }
        if (key.rfind("tool:", 0) == 0) {
            const auto rest = key.substr(5);
            const auto slash = rest.find('/');
            const auto name = rest.substr(0, slash);
            auto it = view_.latest_by_tool.find(name);
            if (it == view_.latest_by_tool.end()) {
                throw TemplateError("no observation of " + name);
            }
            return slash == std::string::npos ? render_value(it->second)
                                              : render_value(at_pointer(it->second, rest.substr(slash)));
        }
        if (key.rfind("count:", 0) == 0) {
            const auto name = key.substr(6);
            return std::to_string(std::count_if(view_.trailing.begin(), view_.trailing.end(),
                                                [&](const Json& o) { return o["tool"] == name; }));
        }
        throw TemplateError("unknown placeholder ${" + key + "}");
    }

    Json trailing() const { return Json(view_.trailing); }

    std::string substitute(std::string_view tmpl) const {
        std::string out;
        std::size_t pos = 0;
        while (pos < tmpl.size()) {
            const auto open = tmpl.find("${", pos);
            if (open == std::string_view::npos) {
                break;
            }
            const auto close = tmpl.find('}', open);
            if (close == std::string_view::npos) {
                throw TemplateError("unterminated ${ in " + std::string(tmpl));
            }
            out.append(tmpl.substr(pos, open - pos));
            out += lookup(std::string(tmpl.substr(open + 2, close - open - 2)));
            pos = close + 1;
        }
        out.append(tmpl.substr(pos));
        return out;
    }

    static std::string expressions(const std::string& text, double i) {
        std::string out;
        std::size_t pos = 0;
        while (pos < text.size()) {
            const auto open = text.find("$[", pos);
            if (open == std::string::npos) {
                break;
            }
            const auto close = text.find(']', open);
            if (close == std::string::npos) {
                throw TemplateError("unterminated $[ in " + text);
            }
            out.append(text, pos, open - pos);
            try {
                out += format_number(evaluate_expression(std::string_view(text).substr(open + 2, close - open - 2), i));
            } catch (const std::invalid_argument& e) {
                throw TemplateError(e.what());
            }
            pos = close + 1;
        }
        out.append(text, pos);
        return out;
    }

    static std::string unescape(const std::string& text) {
        std::string out;
        for (std::size_t k = 0; k < text.size(); ++k) {
            if (text[k] == '\\' && k + 1 < text.size() && text[k + 1] == 'n') {
                out += '\n';
                ++k;
            } else {
                out += text[k];
            }
        }
        return out;
    }

    const View& view_;
    std::vector<std::string> captures_;
};

}  // namespace

ScriptedBackend::ScriptedBackend(Script script, ModelCapabilities caps)
    : script_(std::move(script)), caps_(caps) {}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

ModelResponse ScriptedBackend::complete(const ModelRequest& request) {
    std::lock_guard lock(mutex_);
    ++calls_;
    const auto view = make_view(request.messages);

    for (std::size_t r = 0; r < script_.rules.size(); ++r) {
        const auto& rule = script_.rules[r];
        if (rule.once && spent_.count(r)) {
            continue;
        }
        std::vector<std::string> captures;
        if (!matches(rule, view, captures)) {
            continue;
        }
        if (rule.once) {
            spent_.insert(r);
        }
        const Renderer render(view, std::move(captures));

        if (rule.raw) {
            return {*rule.raw};
        }
        if (!rule.say.empty()) {
            std::string text;
            for (std::size_t k = 0; k < rule.say.size(); ++k) {
                text += (k ? "\n" : "") + render(rule.say[k], 0, true);
            }
            return {text};
        }

        Json calls = Json::array();
        for (const auto& item : rule.calls) {
            long long n = 1;
            if (!item.repeat_count.empty()) {
                double count = 0;
                try {
                    count = evaluate_expression(render(item.repeat_count));
                } catch (const std::invalid_argument& e) {
                    throw TemplateError(e.what());
                }
                if (!(count >= 0 && count <= 10000) || std::floor(count) != count) {
                    throw TemplateError("repeat count must be a whole number in [0, 10000]");
                }
                n = static_cast<long long>(count);
            }
            for (long long k = 0; k < n; ++k) {
                for (const auto& c : item.calls) {
                    const auto group_text = render(c.group, static_cast<double>(k));
                    auto group = parse_number(group_text);
                    if (!group || *group < 0 || std::floor(*group) != *group) {
                        throw TemplateError("call group must be a non-negative integer, got " + group_text);
                    }
                    Json args;
                    try {
                        args = Json::parse(render(c.args, static_cast<double>(k)));
                    } catch (const Json::parse_error& e) {
                        throw TemplateError(script_.source + ":" + std::to_string(c.line) +
                                            ": call arguments are not JSON: " + e.what());
                    }
                    if (!args.is_object()) {
                        throw TemplateError("call arguments must be a JSON object");
                    }
                    calls.push_back({{"id", "c" + std::to_string(next_call_id_++)},
                                     {"group", static_cast<long long>(*group)},
                                     {"name", render(c.tool, static_cast<double>(k))},
                                     {"args", std::move(args)}});
                }
            }
        }
        Json wire = {{"tool_calls", std::move(calls)}};
        std::string reasoning;
        for (std::size_t k = 0; k < rule.think.size(); ++k) {
            reasoning += (k ? "\n" : "") + render(rule.think[k], 0, true);
        }
        if (!reasoning.empty()) {
            wire["reasoning"] = reasoning;
        }
        return {canonical(wire)};
    }

    std::string latest = view.user ? "user: " + *view.user : "tool: " + view.tool_text;
    throw NoMatchingRule(script_.source + ": no rule matches (" + latest + ")");
}

}  // namespace rosa::models
