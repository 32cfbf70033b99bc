#pragma once

#include "rosa/value_type.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rosa::toolkit {

// Downlink tools observe; uplink tools actuate and pass the safety gate.
enum class Direction { Downlink, Uplink };

std::string_view to_string(Direction direction);

struct ParamSpec {
    std::string name;
    ValueType type = ValueType::String;
    bool required = false;
    std::optional<Json> default_value;
    std::string description;
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    Direction direction = Direction::Downlink;
    bool accepts_blacklist = false;
    // Uplink tools with this flag are held for operator approval.
    bool requires_confirmation = false;

    const ParamSpec* param(std::string_view name) const;
};

struct ToolResult {
    Json payload;
    std::string rendered_text;

    static ToolResult from(Json payload);
};

struct ToolError {
    // UnknownTool, ArgValidation, EStopped, Cancelled, or an implementation
    // code such as BadPattern or FileNotFound.
    std::string code;
    std::string message;
    std::vector<std::string> violations;

    std::string text() const;
};

using InvokeResult = std::variant<ToolResult, ToolError>;

inline bool ok(const InvokeResult& r) { return std::holds_alternative<ToolResult>(r); }

// Thrown by tool implementations; invoke() turns it into a ToolError.
class ToolFailure : public std::runtime_error {
public:
    ToolFailure(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Raised at an actuation checkpoint once an e-stop has been acknowledged.
class Cancelled : public ToolFailure {
public:
    explicit Cancelled(const std::string& message) : ToolFailure("Cancelled", message) {}
};

class SafetyGate {
public:
    virtual ~SafetyGate() = default;

    // nullopt admits the call; otherwise the refusal shown to the model.
    virtual std::optional<ToolError> admit(const ToolSpec& spec) = 0;

    // Runs `effect` atomically with respect to e-stop. Throws Cancelled if
    // the e-stop has been engaged.
    virtual void actuate(const std::function<void()>& effect) = 0;
};

struct ToolContext {
    SafetyGate* gate = nullptr;
    std::stop_token stop;
    // Wall time of one logical tick when a tool waits; zero means no sleeping.
    std::chrono::microseconds tick_duration{0};
    std::uint64_t elapsed_ticks = 0;

    // Actuation checkpoint. Without a gate the effect runs directly.
    void actuate(const std::function<void()>& effect);

    // Consumes `ticks` of logical time; sleeps when tick_duration is set.
    // Returns early if a stop is requested.
    void delay(std::uint64_t ticks);

    bool stop_requested() const { return stop.stop_requested(); }
};

using ToolImpl = std::function<Json(const Json& args, ToolContext& ctx)>;

}  // namespace rosa::toolkit
