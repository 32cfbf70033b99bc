#include "rosa/value_type.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace rosa {

namespace {

constexpr std::array<std::pair<ValueType, std::string_view>, 8> kNames{{
    {ValueType::String, "string"},
    {ValueType::Number, "number"},
    {ValueType::Integer, "integer"},
    {ValueType::Boolean, "boolean"},
    {ValueType::StringList, "string_list"},
    {ValueType::NumberList, "number_list"},
    {ValueType::Object, "object"},
    {ValueType::Any, "any"},
}};

bool is_integral(const Json& value) {
    if (value.is_number_integer()) {
        return true;
    }
    if (!value.is_number_float()) {
        return false;
    }
    const double d = value.get<double>();
    return std::isfinite(d) && std::floor(d) == d;
}

}  // namespace

std::string_view to_string(ValueType type) {
    for (const auto& [t, name] : kNames) {
        if (t == type) {
            return name;
        }
    }
    return "any";
}

std::optional<ValueType> value_type_from_string(std::string_view name) {
    for (const auto& [t, n] : kNames) {
        if (n == name) {
            return t;
        }
    }
    return std::nullopt;
}

bool conforms(const Json& value, ValueType type) {
    switch (type) {
        case ValueType::String:
            return value.is_string();
        case ValueType::Number:
            return value.is_number();
        case ValueType::Integer:
            return is_integral(value);
        case ValueType::Boolean:
            return value.is_boolean();
        case ValueType::StringList:
            if (!value.is_array()) {
                return false;
            }
            for (const auto& item : value) {
                if (!item.is_string()) {
                    return false;
                }
            }
            return true;
        case ValueType::NumberList:
            if (!value.is_array()) {
                return false;
            }
            for (const auto& item : value) {
                if (!item.is_number()) {
                    return false;
                }
            }
            return true;
        case ValueType::Object:
            return value.is_object();
        case ValueType::Any:
            return true;
    }
    return false;
}

std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) {
        return std::nullopt;
    }
    // from_chars rejects a leading '+', accept it here for operator input.
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    double out = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out, std::chars_format::general);
    if (ec != std::errc{} || ptr != last || !std::isfinite(out)) {
        return std::nullopt;
    }
    return out;
}

std::string canonical(const Json& value) {
    // nlohmann::json keeps object keys in a std::map, so dump() is already
    // key-sorted; numbers are printed shortest round-trip.
    return value.dump(-1, ' ', false, Json::error_handler_t::replace);
}

}  // namespace rosa
