#pragma once

#include "rosa/graphsim/graph.hpp"

#include <chrono>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rosa::agent {

using graphsim::Tick;

enum class Role { System, User, Assistant, Tool };

std::string_view to_string(Role role);

struct Message {
    Role role = Role::User;
    std::string content;
    Tick origin_tick = 0;

    bool operator==(const Message&) const = default;
};

// ceil(bytes / 4). Deterministic and model-independent.
std::size_t estimate_tokens(std::string_view text);

class HistoryError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Chronological conversation log. System messages may only be added before
// the first non-system message.
class ChatHistory {
public:
    ChatHistory() = default;
    explicit ChatHistory(std::vector<Message> messages);

    void append(Message message);

    const std::vector<Message>& messages() const noexcept { return messages_; }
    std::size_t size() const noexcept { return messages_.size(); }
    bool empty() const noexcept { return messages_.empty(); }

private:
    std::vector<Message> messages_;
};

// Bounded free-text region for the agent's in-progress plans. Shared between
// the agent and the set_scratchpad tool, hence the internal lock.
class Scratchpad {
public:
    explicit Scratchpad(std::size_t budget_tokens = 512) : budget_tokens_(budget_tokens) {}

    // Over-budget text loses its head; the most recent notes survive.
    void set(std::string_view text, Tick tick);
    void clear(Tick tick);

    std::string text() const;
    Tick last_updated_tick() const;
    std::size_t budget_tokens() const noexcept { return budget_tokens_; }

private:
    mutable std::mutex mutex_;
    std::string text_;
    Tick last_updated_ = 0;
    std::size_t budget_tokens_;
};

using RobotSystemPrompts = std::vector<std::string>;

class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct AgentConfig {
    static constexpr std::size_t kMinContextTokens = 8192;

    int max_iterations = 10;
    std::size_t context_budget = 16384;
    std::size_t scratchpad_budget = 512;
    bool require_confirmation_for_uplink = true;

    // Test hooks: logical ticks each named tool waits before running, and
    // the wall time of one tick.
    std::map<std::string, std::uint64_t, std::less<>> injected_delay_ticks;
    std::chrono::microseconds tick_duration{0};

    // Throws InvalidConfig.
    void validate() const;
};

}  // namespace rosa::agent
