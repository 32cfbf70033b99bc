#include "rosa/models/remote_backend.hpp"

#include "rosa/agent/parse.hpp"

#include "httplib.h"

#include <cstdlib>
#include <thread>

namespace rosa::models {

namespace {

Json param_schema(const Json& param) {
    const auto type = param.value("type", "any");
    Json schema;
    if (type == "string_list") {
        schema = {{"type", "array"}, {"items", {{"type", "string"}}}};
    } else if (type == "number_list") {
        schema = {{"type", "array"}, {"items", {{"type", "number"}}}};
    } else if (type != "any") {
        schema = {{"type", type}};
    } else {
        schema = Json::object();
    }
    if (param.contains("description")) {
        schema["description"] = param["description"];
    }
    if (param.contains("default")) {
        schema["default"] = param["default"];
    }
    return schema;
}

Json function_tool(const Json& entry) {
    Json properties = Json::object();
    Json required = Json::array();
    for (const auto& p : entry.value("params", Json::array())) {
        const auto name = p.at("name").get<std::string>();
        properties[name] = param_schema(p);
        if (p.value("required", false)) {
            required.push_back(name);
        }
    }
    return {{"type", "function"},
            {"function",
             {{"name", entry.at("name")},
              {"description", entry.value("description", "")},
              {"parameters", {{"type", "object"}, {"properties", properties}, {"required", required}}}}}};
}

Json provider_message(const agent::Message& m) {
    const std::string role(agent::to_string(m.role));
    if (m.role == agent::Role::Assistant) {
        auto parsed = agent::parse_model_output(m.content);
        if (const auto* batch = std::get_if<agent::ToolCallBatch>(&parsed)) {
            Json calls = Json::array();
            for (const auto& c : batch->calls()) {
                calls.push_back({{"id", c.id},
                                 {"type", "function"},
                                 {"function", {{"name", c.name}, {"arguments", canonical(c.args)}}}});
            }
            Json content = batch->reasoning.empty() ? Json(nullptr) : Json(batch->reasoning);
            return {{"role", role}, {"content", content}, {"tool_calls", calls}};
        }
    }
    if (m.role == agent::Role::Tool) {
        std::string id;
        try {
            id = Json::parse(m.content).value("id", "");
        } catch (const Json::parse_error&) {
        }
        return {{"role", role}, {"tool_call_id", id}, {"content", m.content}};
    }
    return {{"role", role}, {"content", m.content}};
}

bool transient(int status) {
    return status == 408 || status == 429 || status >= 500;
}

}  // namespace

Json to_provider_request(const ModelRequest& request, const std::string& model) {
    Json messages = Json::array();
    for (const auto& m : request.messages) {
        messages.push_back(provider_message(m));
    }
    Json tools = Json::array();
    for (const auto& entry : request.catalog_json) {
        tools.push_back(function_tool(entry));
    }
    return {{"model", model}, {"messages", messages}, {"tools", tools}};
}

std::string from_provider_response(const Json& reply) {
    const Json* message = nullptr;
    if (reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty() &&
        reply["choices"][0].is_object() && reply["choices"][0].contains("message")) {
        message = &reply["choices"][0]["message"];
    }
    if (!message || !message->is_object()) {
        throw ResponseMappingError("reply has no choices[0].message");
    }
    const auto content = message->contains("content") && (*message)["content"].is_string()
                             ? (*message)["content"].get<std::string>()
                             : std::string();
    if (message->contains("tool_calls") && (*message)["tool_calls"].is_array() &&
        !(*message)["tool_calls"].empty()) {
        Json calls = Json::array();
        std::size_t n = 0;
        for (const auto& tc : (*message)["tool_calls"]) {
            ++n;
            if (!tc.is_object() || !tc.contains("function") || !tc["function"].is_object() ||
                !tc["function"].contains("name") || !tc["function"]["name"].is_string()) {
                throw ResponseMappingError("tool call " + std::to_string(n) + " has no function name");
            }
            Json args = Json::object();
            if (tc["function"].contains("arguments")) {
                const auto& raw = tc["function"]["arguments"];
                try {
                    args = raw.is_string() ? Json::parse(raw.get<std::string>()) : raw;
                } catch (const Json::parse_error& e) {
                    throw ResponseMappingError("tool call " + std::to_string(n) + " arguments: " + e.what());
                }
                if (args.is_null()) {
                    args = Json::object();
                }
                if (!args.is_object()) {
                    throw ResponseMappingError("tool call " + std::to_string(n) + " arguments are not an object");
                }
            }
            const auto id = tc.contains("id") && tc["id"].is_string() ? tc["id"].get<std::string>()
                                                                      : "call" + std::to_string(n);
            calls.push_back({{"id", id}, {"group", 0}, {"name", tc["function"]["name"]}, {"args", args}});
        }
        Json wire = {{"tool_calls", calls}};
        if (!content.empty()) {
            wire["reasoning"] = content;
        }
        return canonical(wire);
    }
    if (content.empty()) {
        throw ResponseMappingError("reply carries neither content nor tool calls");
    }
    return content;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
    const auto scheme = config_.endpoint.find("://");
    if (config_.endpoint.empty() || scheme == std::string::npos) {
        throw std::invalid_argument("model.endpoint must be an absolute http(s) URL");
    }
    const auto path = config_.endpoint.find('/', scheme + 3);
    base_ = config_.endpoint.substr(0, path);
    path_ = path == std::string::npos ? "/v1/chat/completions" : config_.endpoint.substr(path);
}

ModelResponse RemoteBackend::complete(const ModelRequest& request) {
    const char* key = std::getenv(config_.credential_env.c_str());
    if (!key || !*key) {
        throw AuthError(config_.credential_env + " is not set");
    }
    const auto body = to_provider_request(request, config_.model).dump();

    httplib::Client client(base_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_bearer_token_auth(key);

    std::string last_failure;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
        }
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            last_failure = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("endpoint rejected the credential (HTTP " + std::to_string(res->status) + ")");
        }
        if (transient(res->status)) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw BackendUnavailable("endpoint returned HTTP " + std::to_string(res->status));
        }
        Json reply;
        try {
            reply = Json::parse(res->body);
        } catch (const Json::parse_error& e) {
            throw ResponseMappingError(std::string("reply is not JSON: ") + e.what());
        }
        return {from_provider_response(reply)};
    }
    throw BackendUnavailable("model endpoint unavailable after " + std::to_string(config_.max_retries + 1) +
                             " attempts (" + last_failure + ")");
}

}  // namespace rosa::models
