#pragma once

#include "rosa/graphsim/graph.hpp"
#include "rosa/toolkit/tool.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>

namespace rosa::agent {

struct PendingConfirmation {
    std::string call_id;
    std::string tool;
    Json args;
};

struct SafetyState {
    bool estopped = false;
    std::optional<PendingConfirmation> pending_confirmation;
    bool human_override_active = false;
};

// Session safety state and the gate every uplink tool passes through.
// Lock order: actuation mutex, then the graph, then the state mutex.
class SafetyController : public toolkit::SafetyGate {
public:
    explicit SafetyController(graphsim::Graph& graph) : graph_(graph) {}

    std::optional<toolkit::ToolError> admit(const toolkit::ToolSpec& spec) override;
    void actuate(const std::function<void()>& effect) override;

    // Waits for any in-flight actuation step, latches the stop, cancels
    // in-flight tools and returns the acknowledgement tick. Every uplink
    // effect carries a tick strictly below it.
    graphsim::Tick estop();
    void reset_estop();
    bool estopped() const noexcept { return estopped_.load(); }
    std::stop_token stop_token() const;

    // At most one pending confirmation; returns false if one is held already.
    bool hold(PendingConfirmation pending);
    std::optional<PendingConfirmation> take_pending();
    std::optional<PendingConfirmation> pending() const;

    // Human commands take precedence: agent uplink calls wait while an
    // override is running.
    class OverrideScope {
    public:
        explicit OverrideScope(SafetyController& safety);
        ~OverrideScope();
        OverrideScope(const OverrideScope&) = delete;
        OverrideScope& operator=(const OverrideScope&) = delete;

    private:
        SafetyController& safety_;
    };
    void wait_for_overrides();

    SafetyState state() const;

private:
    graphsim::Graph& graph_;
    std::mutex actuation_;
    mutable std::mutex state_mutex_;
    std::condition_variable override_cv_;
    std::atomic<bool> estopped_{false};
    std::stop_source stop_source_;
    std::optional<PendingConfirmation> pending_;
    int overrides_active_ = 0;
};

}  // namespace rosa::agent
