#include "rosa/models/script.hpp"

#include "rosa/kv_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rosa::models {

namespace {

std::pair<std::string_view, std::string_view> split_word(std::string_view text) {
    const auto end = text.find_first_of(" \t");
    if (end == std::string_view::npos) {
        return {text, {}};
    }
    auto rest = text.substr(end);
    rest.remove_prefix(std::min(rest.size(), rest.find_first_not_of(" \t")));
    return {text.substr(0, end), rest};
}

class ExprParser {
public:
    ExprParser(std::string_view text, double i) : text_(text), i_(i) {}

    double run() {
        const double v = expr();
        skip();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression \"" + std::string(text_) + "\": " + what);
    }

    void skip() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        for (;;) {
            if (eat('+')) {
                v += term();
            } else if (eat('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v *= unary();
            } else if (eat('/')) {
                const double d = unary();
                if (d == 0) {
                    fail("division by zero");
                }
                v /= d;
            } else if (eat('%')) {
                const double d = unary();
                if (d == 0) {
                    fail("division by zero");
                }
                v = std::fmod(v, d);
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (eat('-')) {
            return -unary();
        }
        if (eat('+')) {
            return unary();
        }
        return primary();
    }

    double primary() {
        skip();
        if (eat('(')) {
            const double v = expr();
            if (!eat(')')) {
                fail("missing ')'");
            }
            return v;
        }
        if (pos_ >= text_.size()) {
            fail("unexpected end");
        }
        const char c = text_[pos_];
        if ((c >= '0' && c <= '9') || c == '.') {
            double v = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
            if (ec != std::errc{}) {
                fail("bad number");
            }
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            return v;
        }
        std::size_t end = pos_;
        while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) {
            ++end;
        }
        const auto name = text_.substr(pos_, end - pos_);
        if (name.empty()) {
            fail("unexpected '" + std::string(1, c) + "'");
        }
        pos_ = end;
        if (name == "i") {
            return i_;
        }
        if (!eat('(')) {
            fail("unknown name " + std::string(name));
        }
        std::vector<double> args{expr()};
        while (eat(',')) {
            args.push_back(expr());
        }
        if (!eat(')')) {
            fail("missing ')'");
        }
        auto arity = [&](std::size_t n) {
            if (args.size() != n) {
                fail(std::string(name) + " takes " + std::to_string(n) + " argument(s)");
            }
        };
        if (name == "ceil") { arity(1); return std::ceil(args[0]); }
        if (name == "floor") { arity(1); return std::floor(args[0]); }
        if (name == "round") { arity(1); return std::round(args[0]); }
        if (name == "abs") { arity(1); return std::fabs(args[0]); }
        if (name == "min") { arity(2); return std::min(args[0], args[1]); }
        if (name == "max") { arity(2); return std::max(args[0], args[1]); }
        fail("unknown function " + std::string(name));
    }

    std::string_view text_;
    double i_;
    std::size_t pos_ = 0;
};

}  // namespace

double evaluate_expression(std::string_view expr, double i) {
    return ExprParser(expr, i).run();
}

std::string format_number(double value) {
    if (std::isfinite(value) && std::floor(value) == value && std::fabs(value) < 1e15) {
        return std::to_string(static_cast<long long>(value));
    }
    return Json(value).dump();
}

Script Script::parse(std::string_view text, std::string source) {
    Script script;
    script.source = source;
    std::istringstream in{std::string(text)};
    std::string raw_line;
    std::size_t line_no = 0;
    ScriptRule* rule = nullptr;
    ScriptRule::CallItem* repeat = nullptr;
    std::size_t repeat_line = 0;

    auto finish_rule = [&]() {
        if (!rule) {
            return;
        }
        if (repeat) {
            throw ScriptError(source, repeat_line, "repeat without end");
        }
        if (rule->triggers.empty()) {
            throw ScriptError(source, rule->line, "rule " + rule->label + " has no when line");
        }
        const int bodies = (rule->calls.empty() ? 0 : 1) + (rule->say.empty() ? 0 : 1) + (rule->raw ? 1 : 0);
        if (bodies != 1) {
            throw ScriptError(source, rule->line,
                              "rule " + rule->label + " needs exactly one of call lines, say lines or raw");
        }
    };

    while (std::getline(in, raw_line)) {
        ++line_no;
        const auto line = trim(raw_line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto [directive, rest] = split_word(line);
        if (directive == "rule") {
            finish_rule();
            if (rest.empty()) {
                throw ScriptError(source, line_no, "rule needs a label");
            }
            script.rules.push_back({});
            rule = &script.rules.back();
            rule->label = std::string(rest);
            rule->line = line_no;
            continue;
        }
        if (!rule) {
            throw ScriptError(source, line_no, "'" + std::string(directive) + "' outside a rule");
        }
        if (directive == "when") {
            const auto [kind, pattern] = split_word(rest);
            ScriptRule::Trigger t;
            if (kind == "any") {
                t.kind = ScriptRule::TriggerKind::Any;
            } else if (kind == "step") {
                t.kind = ScriptRule::TriggerKind::Step;
                auto n = parse_number(pattern);
                if (!n || *n < 1 || std::floor(*n) != *n) {
                    throw ScriptError(source, line_no, "when step needs a positive integer");
                }
                t.step = static_cast<int>(*n);
            } else if (kind == "user" || kind == "tool" || kind == "assistant") {
                t.kind = kind == "user"   ? ScriptRule::TriggerKind::User
                         : kind == "tool" ? ScriptRule::TriggerKind::Tool
                                          : ScriptRule::TriggerKind::Assistant;
                if (pattern.empty()) {
                    throw ScriptError(source, line_no, "when " + std::string(kind) + " needs a regex");
                }
                t.pattern = std::string(pattern);
                try {
                    t.regex = std::regex(t.pattern, std::regex::ECMAScript | std::regex::icase);
                } catch (const std::regex_error& e) {
                    throw ScriptError(source, line_no, std::string("bad regex: ") + e.what());
                }
            } else {
                throw ScriptError(source, line_no, "unknown trigger '" + std::string(kind) + "'");
            }
            rule->triggers.push_back(std::move(t));
        } else if (directive == "once") {
            rule->once = true;
        } else if (directive == "think") {
            rule->think.emplace_back(rest);
        } else if (directive == "say") {
            rule->say.emplace_back(rest);
        } else if (directive == "raw") {
            rule->raw = std::string(rest);
        } else if (directive == "call") {
            const auto [group, after] = split_word(rest);
            const auto [tool, args] = split_word(after);
            if (group.empty() || tool.empty()) {
                throw ScriptError(source, line_no, "call needs a group and a tool name");
            }
            ScriptRule::CallTemplate call{std::string(group), std::string(tool),
                                          args.empty() ? std::string("{}") : std::string(args), line_no};
            if (repeat) {
                repeat->calls.push_back(std::move(call));
            } else {
                rule->calls.push_back({{std::move(call)}, {}});
            }
        } else if (directive == "repeat") {
            if (repeat) {
                throw ScriptError(source, line_no, "repeat blocks do not nest");
            }
            if (rest.empty()) {
                throw ScriptError(source, line_no, "repeat needs a count");
            }
            rule->calls.push_back({{}, std::string(rest)});
            repeat = &rule->calls.back();
            repeat_line = line_no;
        } else if (directive == "end") {
            if (!repeat) {
                throw ScriptError(source, line_no, "end without repeat");
            }
            if (repeat->calls.empty()) {
                throw ScriptError(source, line_no, "empty repeat block");
            }
            repeat = nullptr;
        } else {
            throw ScriptError(source, line_no, "unknown directive '" + std::string(directive) + "'");
        }
    }
    finish_rule();
    return script;
}

Script Script::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScriptError(path.string(), 0, "cannot open script");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

}  // namespace rosa::models
