#include "rosa/models/backend.hpp"

namespace rosa::models {

std::optional<std::string> validate_model(const ModelCapabilities& caps) {
    if (!caps.supports_tool_calling) {
        return "model does not support tool calling, which the agent needs to act";
    }
    if (caps.max_context_tokens < kMinContextTokens) {
        return "model context length " + std::to_string(caps.max_context_tokens) +
               " tokens is below the required minimum of " + std::to_string(kMinContextTokens);
    }
    return std::nullopt;
}

}  // namespace rosa::models
