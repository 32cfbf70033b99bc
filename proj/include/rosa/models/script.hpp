#pragma once

#include "rosa/models/backend.hpp"

#include <filesystem>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rosa::models {

class ScriptError : public std::runtime_error {
public:
    ScriptError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Script rule file grammar, one directive per line, '#' comments:
//
//   rule <label>                 starts a rule
//   when user <regex>            latest message is from the user and matches
//   when tool <regex>            latest messages are tool observations, one line
//                                each: "<tool> <result>" or "<tool> error <message>",
//                                strings unquoted, other values as compact JSON
//   when assistant <regex>       the last final answer given matches
//   when step <n>                n-th model call since the last user message
//   when any                     always
//   once                         the rule fires at most once per backend
//   think <text>                 reasoning sent with tool calls
//   call <group> <tool> <json>   one tool call
//   repeat <expr> ... end        repeats the enclosed call lines; `i` counts from 0
//   say <text>                   final answer line (several lines are joined)
//   raw <text>                   reply sent verbatim
//
// All `when` lines of a rule must hold. Regexes are ECMAScript, searched
// case-insensitively; capture groups are numbered across the rule's regexes.
// Templates accept ${N} (capture), ${/ptr} (JSON pointer into the array of
// latest observations), ${list:/ptr} (bullet list), ${tool:NAME/ptr} (latest
// observation of a tool), ${count:NAME} and $[expr] arithmetic with + - * / %,
// parentheses, ceil, floor, round, min, max, abs and `i`. "\n" is a newline.
struct ScriptRule {
    enum class TriggerKind { User, Tool, Assistant, Step, Any };
    struct Trigger {
        TriggerKind kind = TriggerKind::Any;
        std::string pattern;
        std::regex regex;
        int step = 0;
    };
    struct CallTemplate {
        std::string group;
        std::string tool;
        std::string args;
        std::size_t line = 0;
    };
    // A call line or a repeat block, kept in file order.
    struct CallItem {
        std::vector<CallTemplate> calls;
        std::string repeat_count;  // empty for a plain call
    };

    std::string label;
    std::size_t line = 0;
    std::vector<Trigger> triggers;
    bool once = false;
    std::vector<std::string> think;
    std::vector<CallItem> calls;
    std::vector<std::string> say;
    std::optional<std::string> raw;
};

struct Script {
    std::string source;
    std::vector<ScriptRule> rules;

    static Script parse(std::string_view text, std::string source = "<script>");
    static Script load(const std::filesystem::path& path);
};

// Evaluates a $[...] expression. Throws std::invalid_argument.
double evaluate_expression(std::string_view expr, double i = 0);

// Integral values print without a fractional part; others in shortest
// round-trip form.
std::string format_number(double value);

}  // namespace rosa::models
