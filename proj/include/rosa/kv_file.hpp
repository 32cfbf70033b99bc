#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rosa {

// Line-oriented `key = value` documents used by scenario and config files.
//
//   # comment
//   agent.max_iterations = 10
//   rsp = You are ROSA, ...
//
// Keys may repeat; order is preserved. Values are trimmed of surrounding
// whitespace. A line without '=' is an error.
struct KvEntry {
    std::string key;
    std::string value;
    int line = 0;
};

class KvParseError : public std::runtime_error {
public:
    KvParseError(std::string source, int line, const std::string& what);

    int line() const noexcept { return line_; }

private:
    int line_;
};

class KvDocument {
public:
    static KvDocument parse(std::string_view text, std::string source = "<string>");
    static KvDocument load(const std::filesystem::path& path);

    const std::vector<KvEntry>& entries() const noexcept { return entries_; }
    const std::string& source() const noexcept { return source_; }

    // Last value for `key`, if any.
    std::optional<std::string> get(std::string_view key) const;
    std::vector<std::string> get_all(std::string_view key) const;

private:
    std::vector<KvEntry> entries_;
    std::string source_;
};

std::string_view trim(std::string_view text);

}  // namespace rosa
