#pragma once

#include "rosa/agent/parse.hpp"
#include "rosa/agent/safety.hpp"
#include "rosa/toolkit/registry.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace rosa::agent {

struct Observation {
    std::string call_id;
    std::string tool;
    bool is_error = false;
    std::string error_code;
    Json result;          // payload on success
    std::string content;  // wire text sent back to the model

    static Observation from(const ToolCall& call, const toolkit::InvokeResult& result);
    static Observation failure(const ToolCall& call, toolkit::ToolError error);
};

// Logical interval on the session's execution clock plus wall times.
struct CallTiming {
    std::uint64_t start_tick = 0;
    std::uint64_t end_tick = 0;
    std::chrono::steady_clock::time_point wall_start;
    std::chrono::steady_clock::time_point wall_end;
};

enum class Origin { Agent, Human, Operator };

std::string_view to_string(Origin origin);

// One tool implementation run, reported from the worker that ran it.
struct ToolExecution {
    Origin origin = Origin::Agent;
    ToolCall call;
    Observation observation;
};

struct ExecOptions {
    bool require_confirmation = true;
    std::map<std::string, std::uint64_t, std::less<>> delay_ticks;
    std::chrono::microseconds tick_duration{0};
    std::function<void(const ToolExecution&)> on_executed;
};

struct BatchOutcome {
    std::vector<Observation> observations;  // in call order
    std::vector<CallTiming> timings;
};

inline constexpr std::string_view kConfirmationRequired = "ConfirmationRequired";
inline constexpr std::string_view kDenied = "Denied";

// Runs groups in order and the calls of one group concurrently, joining
// before the next group. `clock` is the session's execution clock; it is
// advanced to the end of the last group. Never throws for tool failures.
BatchOutcome execute_batch(const ToolCallBatch& batch,
                           const toolkit::ToolRegistry& registry,
                           SafetyController& safety,
                           const ExecOptions& options,
                           std::uint64_t& clock);

}  // namespace rosa::agent
