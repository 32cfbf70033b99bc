#pragma once

#include "rosa/models/backend.hpp"

#include <chrono>
#include <string>

namespace rosa::models {

struct RemoteConfig {
    // e.g. https://api.example.com/v1/chat/completions
    std::string endpoint;
    std::string model;
    std::string credential_env = "ROSA_MODEL_API_KEY";
    // Retry delays are backoff_base, 2x, 4x, ...
    std::chrono::milliseconds backoff_base{500};
    int max_retries = 3;
    std::chrono::seconds timeout{60};
    ModelCapabilities capabilities{true, 128000};
};

// Chat-completions request body for `request`. Catalog entries become
// function tools; tool-call wire messages become provider tool_calls.
Json to_provider_request(const ModelRequest& request, const std::string& model);

// Runtime wire content for a provider reply. Throws ResponseMappingError.
std::string from_provider_response(const Json& reply);

class RemoteBackend : public ModelBackend {
public:
    explicit RemoteBackend(RemoteConfig config);

    // Throws AuthError, BackendUnavailable or ResponseMappingError.
    ModelResponse complete(const ModelRequest& request) override;
    ModelCapabilities capabilities() const override { return config_.capabilities; }

private:
    RemoteConfig config_;
    std::string base_;  // scheme://host[:port]
    std::string path_;
};

}  // namespace rosa::models
