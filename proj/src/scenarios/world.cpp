#include "rosa/scenarios/world.hpp"

#include "rosa/agent/agent.hpp"
#include "rosa/toolkit/builtin_tools.hpp"

#include <algorithm>

namespace rosa::scenarios {

namespace {

std::unique_ptr<Robot> make_robot(const ScenarioDef& def) {
    if (def.robot == "spot") {
        return std::make_unique<SpotRobot>(def.camera_description);
    }
    if (def.robot == "eels") {
        return std::make_unique<EelsRobot>(def.heading_error_deg, def.camera_description);
    }
    if (def.robot == "carter") {
        return std::make_unique<CarterRobot>(def.obstacle_distance_m, def.fov_deg, def.camera_description);
    }
    return std::make_unique<DemoRobot>();
}

void seed(graphsim::Graph& graph, const ScenarioDef& def) {
    for (const auto& n : def.nodes) {
        std::vector<graphsim::SubscriptionDecl> subs;
        for (const auto& s : n.subscriptions) {
            subs.push_back({s.name, [](const Json&) {}, s.message_type});
        }
        std::vector<graphsim::ServiceDecl> services;
        for (const auto& s : n.services) {
            services.push_back({s, {}, [](const Json&) { return Json::object(); }});
        }
        graph.register_node(n.name, n.publications, std::move(subs), std::move(services));
    }
    for (const auto& [key, value] : def.params) {
        graph.param_set(key, value);
    }
}

}  // namespace

World build_world(const ScenarioDef& def, const WorldOptions& options) {
    World world;
    world.def = def;
    graphsim::GraphOptions graph_options;
    graph_options.log_mirror = options.log_mirror;
    world.graph = std::make_unique<graphsim::Graph>(graph_options);
    seed(*world.graph, def);

    toolkit::ToolRegistry registry;
    toolkit::register_ros_tools(registry, *world.graph);
    toolkit::register_log_tools(registry);
    toolkit::register_calculation_tools(registry);
    world.robot = make_robot(def);
    world.robot->bind(*world.graph, registry);
    world.scratchpad = std::make_shared<agent::Scratchpad>(options.scratchpad_budget);
    agent::register_scratchpad_tool(registry, world.scratchpad, *world.graph);

    if (!def.tools.empty()) {
        auto keep = def.tools;
        if (std::find(keep.begin(), keep.end(), "set_scratchpad") == keep.end()) {
            keep.push_back("set_scratchpad");
        }
        try {
            registry.retain(keep);
        } catch (const toolkit::RegistryError& e) {
            throw ScenarioError(def.source.string() + ": " + e.what());
        }
    }
    auto injected = toolkit::inject_blacklist(std::move(registry), toolkit::Blacklist(def.blacklist));
    injected.seal();
    world.registry = std::make_shared<const toolkit::ToolRegistry>(std::move(injected));
    return world;
}

}  // namespace rosa::scenarios
