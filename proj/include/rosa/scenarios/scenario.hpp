#pragma once

#include "rosa/graphsim/graph.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rosa::scenarios {

class UnknownScenario : public std::runtime_error {
public:
    explicit UnknownScenario(const std::string& name) : std::runtime_error("unknown scenario: " + name) {}
};

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeSeed {
    std::string name;
    std::vector<graphsim::TopicDecl> publications;
    std::vector<graphsim::TopicDecl> subscriptions;
    std::vector<std::string> services;
};

// A robot scenario, read from a key-value file:
//
//   name = spot
//   robot = spot                      spot | eels | carter | ros_demo
//   rsp = You are ...                 one per system prompt, in order
//   tool = stand_up                   enabled tools; none listed means all
//   blacklist = /rosout               global blacklist entries
//   node = /rosout                    seed graph nodes
//   pub = <node> <topic> <type>
//   sub = <node> <topic> <type>
//   service = <node> <service>
//   param = <key> <json value>
//   heading_error_deg / obstacle_distance_m / fov_deg = <number>
//   camera_description = <text>
//   script = spot.script              default script, relative to the file
struct ScenarioDef {
    std::string name;
    std::string robot;
    std::vector<std::string> rsp;
    std::vector<std::string> tools;
    std::vector<std::string> blacklist;
    std::vector<NodeSeed> nodes;
    std::vector<std::pair<std::string, Json>> params;
    double heading_error_deg = 0.3;
    double obstacle_distance_m = 4.0;
    double fov_deg = 90.0;
    std::string camera_description;
    std::optional<std::filesystem::path> script;
    std::filesystem::path source;

    static ScenarioDef parse(std::string_view text, const std::filesystem::path& source = "<scenario>");
    static ScenarioDef load(const std::filesystem::path& path);

    // Sets one numeric constant or the camera description by key.
    // Throws ScenarioError for anything else.
    void apply_override(const std::string& key, const Json& value);
};

// Every *.scenario file of a directory, by scenario name.
class ScenarioCatalog {
public:
    explicit ScenarioCatalog(const std::filesystem::path& directory);

    std::vector<std::string> names() const;
    const ScenarioDef& get(const std::string& name) const;

private:
    std::map<std::string, ScenarioDef> defs_;
};

}  // namespace rosa::scenarios
