#include "rosa/agent/context.hpp"

namespace rosa::agent {

namespace {

constexpr std::string_view kScratchpadHeader = "Scratchpad (your notes from earlier steps):\n";

void render_messages(std::string& out, const std::vector<Message>& messages) {
    for (const auto& m : messages) {
        out += to_string(m.role);
        out += ": ";
        out += m.content;
        out += '\n';
    }
}

}  // namespace

std::size_t message_tokens(const std::vector<Message>& messages) {
    std::size_t total = 0;
    for (const auto& m : messages) {
        total += estimate_tokens(m.content);
    }
    return total;
}

std::optional<Message> scratchpad_message(const std::string& text) {
    if (text.empty()) {
        return std::nullopt;
    }
    return Message{Role::System, std::string(kScratchpadHeader) + text, 0};
}

std::size_t ContextDocument::token_estimate() const {
    return message_tokens(rsp) + estimate_tokens(catalog) +
           (scratchpad ? estimate_tokens(scratchpad->content) : 0) + message_tokens(history);
}

std::string ContextDocument::render() const {
    std::string out = "[robot system prompts]\n";
    render_messages(out, rsp);
    out += "[tool catalog]\n";
    out += catalog;
    out += "\n[scratchpad]\n";
    if (scratchpad) {
        out += scratchpad->content;
        out += '\n';
    }
    out += "[chat history]\n";
    render_messages(out, history);
    return out;
}

SectionOffsets ContextDocument::offsets() const {
    const auto text = render();
    return {text.find("[robot system prompts]\n"), text.find("[tool catalog]\n"), text.find("\n[scratchpad]\n") + 1,
            text.rfind("[chat history]\n")};
}

std::vector<Message> ContextDocument::messages() const {
    std::vector<Message> out = rsp;
    if (scratchpad) {
        out.push_back(*scratchpad);
    }
    out.insert(out.end(), history.begin(), history.end());
    return out;
}

std::vector<Message> evict_history(const std::vector<Message>& history, std::size_t available_tokens) {
    std::size_t total = message_tokens(history);
    if (total <= available_tokens) {
        return history;
    }
    std::vector<bool> keep(history.size(), true);
    for (std::size_t i = 0; i < history.size() && total > available_tokens; ++i) {
        if (history[i].role == Role::System) {
            continue;
        }
        keep[i] = false;
        total -= estimate_tokens(history[i].content);
    }
    std::vector<Message> out;
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (keep[i]) {
            out.push_back(history[i]);
        }
    }
    return out;
}

ContextDocument assemble_context(const std::vector<Message>& rsp,
                                 const std::string& catalog,
                                 const std::string& scratchpad,
                                 const std::vector<Message>& history,
                                 std::size_t budget) {
    ContextDocument doc;
    doc.rsp = rsp;
    doc.catalog = catalog;
    doc.scratchpad = scratchpad_message(scratchpad);
    const std::size_t fixed = doc.token_estimate();
    if (fixed > budget) {
        throw BudgetTooSmall("system prompts, tool catalog and scratchpad need " + std::to_string(fixed) +
                             " tokens but the budget is " + std::to_string(budget));
    }
    doc.history = evict_history(history, budget - fixed);
    if (doc.token_estimate() > budget) {
        throw BudgetTooSmall("system messages in the chat history alone exceed the context budget");
    }
    doc.evicted = history.size() - doc.history.size();
    return doc;
}

}  // namespace rosa::agent
