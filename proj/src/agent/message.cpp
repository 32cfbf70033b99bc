#include "rosa/agent/message.hpp"

namespace rosa::agent {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::Tool: return "tool";
    }
    return "user";
}

std::size_t estimate_tokens(std::string_view text) {
    return (text.size() + 3) / 4;
}

ChatHistory::ChatHistory(std::vector<Message> messages) {
    for (auto& m : messages) {
        append(std::move(m));
    }
}

void ChatHistory::append(Message message) {
    if (!messages_.empty()) {
        if (message.origin_tick < messages_.back().origin_tick) {
            throw HistoryError("history must stay chronological");
        }
        if (message.role == Role::System && messages_.back().role != Role::System) {
            throw HistoryError("system messages are only created at session start");
        }
    }
    messages_.push_back(std::move(message));
}

void Scratchpad::set(std::string_view text, Tick tick) {
    const std::size_t max_bytes = budget_tokens_ * 4;
    if (text.size() > max_bytes) {
        std::size_t cut = text.size() - max_bytes;
        // Step forward past UTF-8 continuation bytes so we never split a character.
        while (cut < text.size() && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) {
            ++cut;
        }
        text.remove_prefix(cut);
    }
    std::lock_guard lock(mutex_);
    text_.assign(text);
    last_updated_ = tick;
}

void Scratchpad::clear(Tick tick) {
    std::lock_guard lock(mutex_);
    text_.clear();
    last_updated_ = tick;
}

std::string Scratchpad::text() const {
    std::lock_guard lock(mutex_);
    return text_;
}

Tick Scratchpad::last_updated_tick() const {
    std::lock_guard lock(mutex_);
    return last_updated_;
}

void AgentConfig::validate() const {
    if (max_iterations < 1) {
        throw InvalidConfig("agent.max_iterations must be a positive integer");
    }
    if (context_budget < kMinContextTokens) {
        throw InvalidConfig("agent.context_budget must be at least " + std::to_string(kMinContextTokens) +
                            " tokens (got " + std::to_string(context_budget) +
                            "); models need a context length of no less than 8192 tokens");
    }
    if (scratchpad_budget * 2 > context_budget) {
        throw InvalidConfig("agent.scratchpad_budget must be at most half of agent.context_budget");
    }
}

}  // namespace rosa::agent
