#include "rosa/kv_file.hpp"

#include <fstream>
#include <sstream>

namespace rosa {

KvParseError::KvParseError(std::string source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string_view trim(std::string_view text) {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

KvDocument KvDocument::parse(std::string_view text, std::string source) {
    KvDocument doc;
    doc.source_ = std::move(source);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const auto raw = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        ++line_no;
        const auto line = trim(raw);
        if (!line.empty() && line.front() != '#') {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw KvParseError(doc.source_, line_no, "expected 'key = value'");
            }
            const auto key = trim(line.substr(0, eq));
            if (key.empty()) {
                throw KvParseError(doc.source_, line_no, "empty key");
            }
            doc.entries_.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
        }
        if (end == std::string_view::npos) {
            break;
        }
        pos = end + 1;
    }
    return doc;
}

KvDocument KvDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::optional<std::string> KvDocument::get(std::string_view key) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        if (it->key == key) {
            return it->value;
        }
    }
    return std::nullopt;
}

std::vector<std::string> KvDocument::get_all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
        if (e.key == key) {
            out.push_back(e.value);
        }
    }
    return out;
}

}  // namespace rosa
