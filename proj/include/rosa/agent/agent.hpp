#pragma once

#include "rosa/agent/context.hpp"
#include "rosa/agent/executor.hpp"
#include "rosa/agent/message.hpp"
#include "rosa/agent/parse.hpp"
#include "rosa/agent/safety.hpp"
#include "rosa/models/backend.hpp"
#include "rosa/toolkit/registry.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rosa::agent {

struct StepTrace {
    int iteration = 0;
    std::string reasoning;
    std::vector<ToolCall> actions;
    std::vector<Observation> observations;  // same order as actions
    std::vector<CallTiming> timings;
    std::vector<std::string> phases{"reasoning", "action", "observation"};

    Json to_json() const;
};

enum class TurnStatus { Completed, AwaitingConfirmation, IterationLimit, Malformed };

std::string_view to_string(TurnStatus status);

struct TurnResult {
    TurnStatus status = TurnStatus::Completed;
    std::string final_answer;
    std::vector<StepTrace> steps;
    std::optional<PendingConfirmation> pending;
};

struct TurnOptions {
    std::optional<std::string> language;
};

enum class Decision { Approve, Deny };

// Receives the ReAct stream as it happens. on_tool_executed may be called
// from worker threads.
class TurnObserver {
public:
    virtual ~TurnObserver() = default;
    virtual void on_reasoning(int /*iteration*/, const std::string& /*text*/) {}
    virtual void on_action(int /*iteration*/, const ToolCall& /*call*/) {}
    virtual void on_observation(int /*iteration*/, const Observation& /*obs*/) {}
    virtual void on_step(const StepTrace& /*trace*/) {}
    virtual void on_tool_executed(const ToolExecution& /*execution*/) {}
};

class AgentBusy : public std::runtime_error {
public:
    AgentBusy() : std::runtime_error("a turn is already running in this session") {}
};

class NoPendingConfirmation : public std::logic_error {
public:
    NoPendingConfirmation() : std::logic_error("no action is awaiting confirmation") {}
};

// Registers set_scratchpad, the model's handle on its own notes.
void register_scratchpad_tool(toolkit::ToolRegistry& registry,
                              std::shared_ptr<Scratchpad> scratchpad,
                              graphsim::Graph& graph);

class Agent {
public:
    // The registry must be sealed. Throws InvalidConfig.
    Agent(AgentConfig config,
          RobotSystemPrompts prompts,
          std::shared_ptr<const toolkit::ToolRegistry> registry,
          models::ModelBackend& backend,
          graphsim::Graph& graph,
          std::shared_ptr<Scratchpad> scratchpad = nullptr);

    // Throws AgentBusy, BudgetTooSmall and models::ModelError.
    TurnResult run_turn(std::string_view user_message, const TurnOptions& options = {},
                        TurnObserver* observer = nullptr);

    // Resolves the held uplink call and resumes the loop with a fresh
    // iteration budget. Throws NoPendingConfirmation.
    TurnResult confirm_action(Decision decision, TurnObserver* observer = nullptr);

    graphsim::Tick estop();
    void reset_estop();

    // Runs an uplink tool directly, ahead of queued agent calls and without
    // confirmation. Failures come back as ToolErrors.
    toolkit::InvokeResult human_override(std::string_view tool, const Json& args, TurnObserver* observer = nullptr);

    const AgentConfig& config() const noexcept { return config_; }
    const toolkit::ToolRegistry& registry() const noexcept { return *registry_; }
    SafetyController& safety() noexcept { return safety_; }
    Scratchpad& scratchpad() noexcept { return *scratchpad_; }
    ChatHistory history() const;
    std::optional<ContextDocument> last_context() const;

private:
    TurnResult loop(int first_iteration, TurnObserver* observer, TurnResult result);
    ContextDocument assemble() const;
    ExecOptions exec_options(TurnObserver* observer) const;
    void append(Role role, std::string content);
    TurnResult finish(TurnResult result, TurnStatus status, std::string answer);

    AgentConfig config_;
    std::vector<Message> rsp_;
    std::shared_ptr<const toolkit::ToolRegistry> registry_;
    std::string catalog_;
    models::ModelBackend& backend_;
    graphsim::Graph& graph_;
    std::shared_ptr<Scratchpad> scratchpad_;
    SafetyController safety_;

    std::mutex turn_mutex_;
    mutable std::mutex data_mutex_;
    ChatHistory history_;
    std::optional<ContextDocument> last_context_;
    std::optional<std::string> language_;
    std::uint64_t exec_clock_ = 0;
};

}  // namespace rosa::agent
