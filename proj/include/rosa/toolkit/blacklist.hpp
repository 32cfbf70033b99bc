#pragma once

#include "rosa/value_type.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rosa::toolkit {

// Exact names, or prefixes written with a trailing '*'. Case-sensitive.
class Blacklist {
public:
    Blacklist() = default;
    explicit Blacklist(std::vector<std::string> entries);

    bool matches(std::string_view name) const;
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<std::string>& entries() const noexcept { return entries_; }

    // Entries of `a` followed by entries of `b` not already present.
    static Blacklist merge(const Blacklist& a, const Blacklist& b);
    static Blacklist from_json(const Json& list);

private:
    std::vector<std::string> entries_;
};

}  // namespace rosa::toolkit
