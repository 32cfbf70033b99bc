#pragma once

// Introspection, log and calculation tools available to every session.

#include "rosa/graphsim/graph.hpp"
#include "rosa/toolkit/blacklist.hpp"
#include "rosa/toolkit/registry.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rosa::toolkit {

// {nodes, total, namespace, pattern}. Filters run namespace, then pattern
// (full match), then blacklist. Throws ToolFailure("BadPattern") on an
// invalid regex.
Json node_list(const graphsim::Graph& graph,
               const std::optional<std::string>& pattern = std::nullopt,
               const std::optional<std::string>& ns = std::nullopt,
               const Blacklist& blacklist = {});

enum class TopicMode { List, Echo };

// List: {topics:[{name,type}], total}. Echo: {topic, messages, total} with
// the newest min(count, buffered) payloads, oldest first.
Json topic_echo(const graphsim::Graph& graph, TopicMode mode, const std::optional<std::string>& topic,
                int count = 1, const Blacklist& blacklist = {});

// {service, response}
Json service_call(graphsim::Graph& graph, const std::string& service, const Json& request);

// {entries:[{tick,level,node,text}], total, level_filter}
Json read_log(const std::filesystem::path& directory, const std::string& filename,
              const std::optional<std::string>& level_filter = std::nullopt,
              const std::optional<int>& num_lines = std::nullopt);

double add_all(const std::vector<double>& numbers);

struct MeanStdev {
    double mean = 0.0;
    double stdev = 0.0;
};

// Sample standard deviation (n - 1 denominator); needs at least two values.
MeanStdev mean(const std::vector<double>& numbers);

void register_ros_tools(ToolRegistry& registry, graphsim::Graph& graph);
void register_log_tools(ToolRegistry& registry);
void register_calculation_tools(ToolRegistry& registry);

}  // namespace rosa::toolkit
