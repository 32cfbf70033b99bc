#pragma once

#include "rosa/value_type.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rosa::agent {

struct ToolCall {
    std::string id;
    int group = 0;
    std::string name;
    Json args = Json::object();

    bool operator==(const ToolCall&) const = default;
};

// Calls grouped by their group number, groups in ascending order. Calls of
// one group run concurrently; groups run one after another.
struct ToolCallBatch {
    std::string reasoning;
    std::vector<std::vector<ToolCall>> groups;

    std::size_t call_count() const;
    std::vector<ToolCall> calls() const;
};

struct FinalAnswer {
    std::string text;
};

struct Malformed {
    std::string diagnostic;
    std::size_t position = 0;
};

using ParsedOutput = std::variant<FinalAnswer, ToolCallBatch, Malformed>;

// A JSON object with a "tool_calls" key is a batch; any other reply is the
// final answer verbatim. Broken JSON that mentions tool_calls is Malformed.
ParsedOutput parse_model_output(std::string_view raw);

// Wire form of a batch, as an assistant message content.
std::string to_wire(const ToolCallBatch& batch);

// Wire form of a tool observation (role=tool content).
std::string observation_result(std::string_view call_id, const Json& result);
std::string observation_error(std::string_view call_id, std::string_view error);

}  // namespace rosa::agent
