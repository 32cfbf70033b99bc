#pragma once

#include "rosa/agent/message.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rosa::agent {

class BudgetTooSmall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SectionOffsets {
    std::size_t rsp = 0;
    std::size_t catalog = 0;
    std::size_t scratchpad = 0;
    std::size_t history = 0;
};

// The prompt sent to the model, section by section, in the fixed order
// robot system prompts, tool catalog, scratchpad, chat history.
struct ContextDocument {
    std::vector<Message> rsp;
    std::string catalog;
    std::optional<Message> scratchpad;
    std::vector<Message> history;
    std::size_t evicted = 0;

    // Sum of per-part estimates; this is what the budget bounds.
    std::size_t token_estimate() const;

    // Flattened text with one header per section, in section order.
    std::string render() const;
    SectionOffsets offsets() const;

    // System prompts, scratchpad and history as chat messages; the catalog
    // travels separately in a model request.
    std::vector<Message> messages() const;
};

std::size_t message_tokens(const std::vector<Message>& messages);

// Drops the oldest non-system messages until the rest fit in
// `available_tokens`. Order is preserved; system messages always stay.
std::vector<Message> evict_history(const std::vector<Message>& history, std::size_t available_tokens);

// Throws BudgetTooSmall when the fixed sections (or the history's system
// messages) cannot fit.
ContextDocument assemble_context(const std::vector<Message>& rsp,
                                 const std::string& catalog,
                                 const std::string& scratchpad,
                                 const std::vector<Message>& history,
                                 std::size_t budget);

// Chat message carrying scratchpad text, or nullopt when it is empty.
std::optional<Message> scratchpad_message(const std::string& text);

}  // namespace rosa::agent
