#pragma once

#include "rosa/toolkit/blacklist.hpp"
#include "rosa/toolkit/tool.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rosa::toolkit {

class RegistryError : public std::runtime_error {
public:
    enum class Code { DuplicateTool, MissingDescription, Sealed, BadSpec };

    RegistryError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

class ToolRegistry {
public:
    void register_tool(ToolSpec spec, ToolImpl impl);

    // Keeps only the named tools, in their registration order. Unknown names
    // are a BadSpec error.
    void retain(const std::vector<std::string>& names);

    // Freezes the registry; a session seals it before its first turn.
    void seal() noexcept { sealed_ = true; }
    bool sealed() const noexcept { return sealed_; }

    const ToolSpec* find(std::string_view name) const;
    std::vector<ToolSpec> specs() const;
    std::size_t size() const noexcept { return order_.size(); }
    const Blacklist& global_blacklist() const noexcept { return global_blacklist_; }

    // Model-facing catalog: one entry per tool in registration order, params
    // listed required-first.
    Json catalog() const;
    std::string render_catalog() const;

    // Validates `args`, consults the gate for uplink tools and runs the
    // implementation. Never throws; every failure is a ToolError.
    InvokeResult invoke(std::string_view name, const Json& args, ToolContext& ctx) const;
    InvokeResult invoke(std::string_view name, const Json& args) const;

    // Checks and normalizes arguments: rejects unknown keys, requires
    // required keys, coerces numeric strings, fills defaults.
    std::variant<Json, ToolError> validate(const ToolSpec& spec, const Json& args) const;

private:
    friend ToolRegistry inject_blacklist(ToolRegistry registry, const Blacklist& global);

    struct Entry {
        ToolSpec spec;
        ToolImpl impl;
    };

    std::vector<std::string> order_;
    std::map<std::string, Entry, std::less<>> tools_;
    Blacklist global_blacklist_;
    bool sealed_ = false;
};

// Wraps every tool with accepts_blacklist so its effective blacklist is the
// union of `global` and whatever the caller passes. Other tools are untouched.
ToolRegistry inject_blacklist(ToolRegistry registry, const Blacklist& global);

}  // namespace rosa::toolkit
