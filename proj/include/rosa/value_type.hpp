#pragma once

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace rosa {

using Json = nlohmann::json;

// Semantic types shared by service request schemas and tool parameters.
enum class ValueType {
    String,
    Number,
    Integer,
    Boolean,
    StringList,
    NumberList,
    Object,
    Any,
};

std::string_view to_string(ValueType type);
std::optional<ValueType> value_type_from_string(std::string_view name);

// True when `value` already has the shape `type` describes (no coercion).
bool conforms(const Json& value, ValueType type);

// Parses a string holding exactly one finite decimal number. Leading or
// trailing garbage, empty strings, inf and nan are rejected.
std::optional<double> parse_number(std::string_view text);

// Canonical text form used everywhere a payload is shown to a model or
// written to disk: sorted keys, shortest round-trip numbers, UTF-8.
std::string canonical(const Json& value);

}  // namespace rosa
