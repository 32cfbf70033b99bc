#pragma once

#include "rosa/models/backend.hpp"
#include "rosa/models/script.hpp"

#include <mutex>
#include <set>

namespace rosa::models {

// Deterministic replay backend. The first enabled rule whose triggers hold
// answers; `once` rules are disabled after firing. No match is an error.
class ScriptedBackend : public ModelBackend {
public:
    explicit ScriptedBackend(Script script, ModelCapabilities caps = {true, 128000});

    ModelResponse complete(const ModelRequest& request) override;
    ModelCapabilities capabilities() const override { return caps_; }

    std::size_t calls() const;

private:
    Script script_;
    ModelCapabilities caps_;
    mutable std::mutex mutex_;
    std::set<std::size_t> spent_;
    std::size_t next_call_id_ = 1;
    std::size_t calls_ = 0;
};

}  // namespace rosa::models
