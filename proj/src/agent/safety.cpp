#include "rosa/agent/safety.hpp"

namespace rosa::agent {

std::optional<toolkit::ToolError> SafetyController::admit(const toolkit::ToolSpec& spec) {
    if (spec.direction == toolkit::Direction::Uplink && estopped_.load()) {
        return toolkit::ToolError{"EStopped", "e-stopped: " + spec.name + " was not executed", {}};
    }
    return std::nullopt;
}

void SafetyController::actuate(const std::function<void()>& effect) {
    std::lock_guard lock(actuation_);
    if (estopped_.load()) {
        throw toolkit::Cancelled("cancelled by e-stop");
    }
    effect();
}

graphsim::Tick SafetyController::estop() {
    std::lock_guard lock(actuation_);
    estopped_.store(true);
    {
        std::lock_guard state(state_mutex_);
        stop_source_.request_stop();
    }
    return graph_.mark();
}

void SafetyController::reset_estop() {
    std::lock_guard lock(actuation_);
    std::lock_guard state(state_mutex_);
    stop_source_ = std::stop_source{};
    estopped_.store(false);
}

std::stop_token SafetyController::stop_token() const {
    std::lock_guard state(state_mutex_);
    return stop_source_.get_token();
}

bool SafetyController::hold(PendingConfirmation pending) {
    std::lock_guard state(state_mutex_);
    if (pending_) {
        return false;
    }
    pending_ = std::move(pending);
    return true;
}

std::optional<PendingConfirmation> SafetyController::take_pending() {
    std::lock_guard state(state_mutex_);
    auto out = std::move(pending_);
    pending_.reset();
    return out;
}

std::optional<PendingConfirmation> SafetyController::pending() const {
    std::lock_guard state(state_mutex_);
    return pending_;
}

SafetyController::OverrideScope::OverrideScope(SafetyController& safety) : safety_(safety) {
    std::lock_guard state(safety_.state_mutex_);
    ++safety_.overrides_active_;
}

SafetyController::OverrideScope::~OverrideScope() {
    {
        std::lock_guard state(safety_.state_mutex_);
        --safety_.overrides_active_;
    }
    safety_.override_cv_.notify_all();
}

void SafetyController::wait_for_overrides() {
    std::unique_lock state(state_mutex_);
    override_cv_.wait(state, [this] { return overrides_active_ == 0; });
}

SafetyState SafetyController::state() const {
    std::lock_guard state(state_mutex_);
    return {estopped_.load(), pending_, overrides_active_ > 0};
}

}  // namespace rosa::agent
