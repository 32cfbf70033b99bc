#pragma once

#include "rosa/agent/message.hpp"
#include "rosa/value_type.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rosa::models {

struct ModelRequest {
    std::vector<agent::Message> messages;
    // Canonical rendering of the catalog, and the same catalog as JSON for
    // backends that speak a provider schema.
    std::string catalog;
    Json catalog_json = Json::array();
};

struct ModelResponse {
    std::string content;
};

struct ModelCapabilities {
    bool supports_tool_calling = true;
    std::size_t max_context_tokens = 0;
};

inline constexpr std::size_t kMinContextTokens = 8192;

// nullopt when the model is usable, otherwise the reason it is not.
std::optional<std::string> validate_model(const ModelCapabilities& caps);

// Base of every backend failure the agent surfaces as
// ModelBackendUnavailable.
class ModelError : public std::runtime_error {
public:
    ModelError(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class BackendUnavailable : public ModelError {
public:
    explicit BackendUnavailable(const std::string& what) : ModelError("BackendUnavailable", what) {}
};

class AuthError : public ModelError {
public:
    explicit AuthError(const std::string& what) : ModelError("AuthError", what) {}
};

class ResponseMappingError : public ModelError {
public:
    explicit ResponseMappingError(const std::string& what) : ModelError("ResponseMappingError", what) {}
};

class NoMatchingRule : public ModelError {
public:
    explicit NoMatchingRule(const std::string& what) : ModelError("NoMatchingRule", what) {}
};

class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual ModelResponse complete(const ModelRequest& request) = 0;
    virtual ModelCapabilities capabilities() const = 0;
};

}  // namespace rosa::models
