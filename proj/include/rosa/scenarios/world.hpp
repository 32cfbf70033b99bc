#pragma once

#include "rosa/agent/message.hpp"
#include "rosa/scenarios/robots.hpp"
#include "rosa/scenarios/scenario.hpp"
#include "rosa/toolkit/registry.hpp"

#include <filesystem>
#include <memory>
#include <optional>

namespace rosa::scenarios {

struct WorldOptions {
    std::optional<std::filesystem::path> log_mirror;
    std::size_t scratchpad_budget = 512;
};

// A live scenario: seeded graph, bound robot, and the sealed tool registry
// (built-in, robot and scratchpad tools, filtered and blacklist-injected).
struct World {
    ScenarioDef def;
    std::unique_ptr<graphsim::Graph> graph;
    std::unique_ptr<Robot> robot;
    std::shared_ptr<agent::Scratchpad> scratchpad;
    std::shared_ptr<const toolkit::ToolRegistry> registry;

    template <class R>
    R& robot_as() {
        auto* r = dynamic_cast<R*>(robot.get());
        if (!r) {
            throw std::logic_error("scenario " + def.name + " has a different robot");
        }
        return *r;
    }
};

World build_world(const ScenarioDef& def, const WorldOptions& options = {});

}  // namespace rosa::scenarios
