#include "rosa/toolkit/builtin_tools.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <regex>

namespace rosa::toolkit {

namespace {

bool in_namespace(std::string_view name, std::string_view ns) {
    if (ns.empty() || ns == "/") {
        return true;
    }
    if (ns.back() == '/') {
        ns.remove_suffix(1);
    }
    if (name.substr(0, ns.size()) != ns) {
        return false;
    }
    return name.size() == ns.size() || name[ns.size()] == '/';
}

std::optional<std::string> opt_string(const Json& args, const char* key) {
    auto it = args.find(key);
    if (it == args.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->get<std::string>();
}

std::vector<double> numbers_of(const Json& args) {
    std::vector<double> out;
    for (const auto& v : args.at("numbers")) {
        out.push_back(v.get<double>());
    }
    return out;
}

Blacklist blacklist_of(const Json& args) {
    return Blacklist::from_json(args.value("blacklist", Json::array()));
}

}  // namespace

Json node_list(const graphsim::Graph& graph, const std::optional<std::string>& pattern,
               const std::optional<std::string>& ns, const Blacklist& blacklist) {
    std::optional<std::regex> re;
    if (pattern) {
        try {
            re.emplace(*pattern, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            throw ToolFailure("BadPattern", "invalid pattern '" + *pattern + "': " + e.what());
        }
    }
    std::vector<std::string> nodes = graph.snapshot().nodes;
    if (ns) {
        std::erase_if(nodes, [&](const std::string& n) { return !in_namespace(n, *ns); });
    }
    if (re) {
        std::erase_if(nodes, [&](const std::string& n) { return !std::regex_match(n, *re); });
    }
    if (!blacklist.empty()) {
        std::erase_if(nodes, [&](const std::string& n) { return blacklist.matches(n); });
    }
    const auto total = nodes.size();
    return Json{{"nodes", std::move(nodes)},
                {"total", total},
                {"namespace", ns.value_or("/")},
                {"pattern", pattern.value_or(".*")}};
}

Json topic_echo(const graphsim::Graph& graph, TopicMode mode, const std::optional<std::string>& topic, int count,
                const Blacklist& blacklist) {
    if (mode == TopicMode::List) {
        Json topics = Json::array();
        for (const auto& t : graph.snapshot().topics) {
            if (!blacklist.matches(t.name)) {
                topics.push_back({{"name", t.name}, {"type", t.message_type}});
            }
        }
        const auto total = topics.size();
        return Json{{"topics", std::move(topics)}, {"total", total}};
    }
    if (!topic) {
        throw ToolFailure("ArgValidation", "echo mode requires a topic");
    }
    if (count < 1) {
        throw ToolFailure("ArgValidation", "count must be a positive integer");
    }
    if (blacklist.matches(*topic)) {
        throw ToolFailure("Blacklisted", "topic '" + *topic + "' is blacklisted");
    }
    const auto buffer = graph.topic_buffer(*topic);
    const std::size_t keep = std::min<std::size_t>(buffer.size(), static_cast<std::size_t>(count));
    Json messages = Json::array();
    for (std::size_t i = buffer.size() - keep; i < buffer.size(); ++i) {
        messages.push_back(buffer[i]);
    }
    return Json{{"topic", *topic}, {"messages", std::move(messages)}, {"total", keep}};
}

Json service_call(graphsim::Graph& graph, const std::string& service, const Json& request) {
    return Json{{"service", service}, {"response", graph.call_service(service, request)}};
}

Json read_log(const std::filesystem::path& directory, const std::string& filename,
              const std::optional<std::string>& level_filter, const std::optional<int>& num_lines) {
    if (level_filter && !graphsim::log_level_from_string(*level_filter)) {
        throw ToolFailure("BadLevel", "unknown level filter '" + *level_filter + "'");
    }
    if (num_lines && *num_lines < 1) {
        throw ToolFailure("ArgValidation", "num_lines must be a positive integer");
    }
    const auto path = directory / filename;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ToolFailure("FileNotFound", "log file '" + path.string() + "' does not exist");
    }
    Json entries = Json::array();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::array<std::size_t, 3> tabs{};
        std::size_t from = 0;
        bool ok = true;
        for (auto& t : tabs) {
            t = line.find('\t', from);
            if (t == std::string::npos) {
                ok = false;
                break;
            }
            from = t + 1;
        }
        const std::string tick_text = ok ? line.substr(0, tabs[0]) : "";
        const std::string level = ok ? line.substr(tabs[0] + 1, tabs[1] - tabs[0] - 1) : "";
        const auto tick = parse_number(tick_text);
        if (!ok || !tick || tick_text.find_first_not_of("0123456789") != std::string::npos ||
            !graphsim::log_level_from_string(level)) {
            throw ToolFailure("MalformedLine", "malformed log line " + std::to_string(line_no) + " in '" +
                                                   path.string() + "'");
        }
        if (level_filter && level != *level_filter) {
            continue;
        }
        entries.push_back({{"tick", static_cast<std::uint64_t>(*tick)},
                           {"level", level},
                           {"node", line.substr(tabs[1] + 1, tabs[2] - tabs[1] - 1)},
                           {"text", line.substr(tabs[2] + 1)}});
    }
    if (num_lines && entries.size() > static_cast<std::size_t>(*num_lines)) {
        entries.erase(entries.begin(), entries.end() - *num_lines);
    }
    const auto total = entries.size();
    return Json{{"entries", std::move(entries)},
                {"total", total},
                {"level_filter", level_filter ? Json(*level_filter) : Json(nullptr)}};
}

double add_all(const std::vector<double>& numbers) {
    if (numbers.empty()) {
        throw ToolFailure("EmptyList", "add_all needs at least one number");
    }
    double sum = 0.0;
    for (double x : numbers) {
        sum += x;
    }
    return sum;
}

MeanStdev mean(const std::vector<double>& numbers) {
    if (numbers.size() < 2) {
        throw ToolFailure("TooFewElements", "mean needs at least two numbers for a sample deviation");
    }
    const auto n = static_cast<double>(numbers.size());
    double sum = 0.0;
    for (double x : numbers) {
        sum += x;
    }
    const double m = sum / n;
    double ss = 0.0;
    for (double x : numbers) {
        ss += (x - m) * (x - m);
    }
    return {m, std::sqrt(ss / (n - 1.0))};
}

void register_ros_tools(ToolRegistry& registry, graphsim::Graph& graph) {
    registry.register_tool(
        {"rosnode_list",
         "Returns a list of running ROS nodes with optional filtering.",
         {{"pattern", ValueType::String, false, std::nullopt, "A regex pattern to filter nodes (full match)."},
          {"namespace", ValueType::String, false, std::nullopt, "ROS namespace to scope the search."}},
         Direction::Downlink,
         true,
         false},
        [&graph](const Json& args, ToolContext&) {
            return node_list(graph, opt_string(args, "pattern"), opt_string(args, "namespace"), blacklist_of(args));
        });

    registry.register_tool(
        {"rostopic",
         "Lists topics with their message types (mode=list) or returns the most recent messages "
         "published on one topic (mode=echo).",
         {{"mode", ValueType::String, false, Json("list"), "Either 'list' or 'echo'."},
          {"topic", ValueType::String, false, std::nullopt, "Topic to echo; required in echo mode."},
          {"count", ValueType::Integer, false, Json(1), "How many recent messages to return in echo mode."}},
         Direction::Downlink,
         true,
         false},
        [&graph](const Json& args, ToolContext&) {
            const auto mode = args.at("mode").get<std::string>();
            if (mode != "list" && mode != "echo") {
                throw ToolFailure("ArgValidation", "mode must be 'list' or 'echo'");
            }
            return topic_echo(graph, mode == "list" ? TopicMode::List : TopicMode::Echo, opt_string(args, "topic"),
                              args.at("count").get<int>(), blacklist_of(args));
        });

    registry.register_tool(
        {"rosservice_list",
         "Lists available services and the fields each request expects.",
         {},
         Direction::Downlink,
         true,
         false},
        [&graph](const Json& args, ToolContext&) {
            const auto bl = blacklist_of(args);
            Json services = Json::array();
            for (const auto& name : graph.snapshot().services) {
                if (!bl.matches(name)) {
                    services.push_back(name);
                }
            }
            const auto total = services.size();
            return Json{{"services", std::move(services)}, {"total", total}};
        });

    registry.register_tool(
        {"rosservice_call",
         "Calls a ROS service with the given request fields and returns its response.",
         {{"service", ValueType::String, true, std::nullopt, "Fully qualified service name."},
          {"request", ValueType::Object, false, Json::object(), "Request fields as a JSON object."}},
         Direction::Uplink,
         false,
         true},
        [&graph](const Json& args, ToolContext& ctx) {
            Json out;
            ctx.actuate([&] { out = service_call(graph, args.at("service"), args.at("request")); });
            return out;
        });

    registry.register_tool(
        {"rosparam_list", "Lists parameter names on the parameter server, sorted.", {}, Direction::Downlink, false,
         false},
        [&graph](const Json&, ToolContext&) {
            auto keys = graph.param_list();
            const auto total = keys.size();
            return Json{{"keys", std::move(keys)}, {"total", total}};
        });

    registry.register_tool(
        {"rosparam_get",
         "Gets the value of one parameter.",
         {{"key", ValueType::String, true, std::nullopt, "Parameter name."}},
         Direction::Downlink,
         false,
         false},
        [&graph](const Json& args, ToolContext&) {
            const auto key = args.at("key").get<std::string>();
            return Json{{"key", key}, {"value", graph.param_get(key)}};
        });

    registry.register_tool(
        {"rosparam_set",
         "Sets one parameter to a new value.",
         {{"key", ValueType::String, true, std::nullopt, "Parameter name."},
          {"value", ValueType::Any, true, std::nullopt, "New value (number, string, boolean, list or object)."}},
         Direction::Uplink,
         false,
         false},
        [&graph](const Json& args, ToolContext& ctx) {
            const auto key = args.at("key").get<std::string>();
            ctx.actuate([&] { graph.param_set(key, args.at("value")); });
            return Json{{"key", key}, {"value", args.at("value")}};
        });

    registry.register_tool(
        {"roslaunch_list",
         "Lists launch files of a ROS package.",
         {{"package", ValueType::String, true, std::nullopt, "Package name."}},
         Direction::Downlink,
         false,
         false},
        [](const Json& args, ToolContext&) -> Json {
            throw ToolFailure("NotSupported", "package '" + args.at("package").get<std::string>() +
                                                  "': launch files are not supported in simulation");
        });
}

void register_log_tools(ToolRegistry& registry) {
    registry.register_tool(
        {"read_log",
         "Reads a log file and returns entries matching the specified criteria.",
         {{"log_file_directory", ValueType::String, true, std::nullopt, "Directory holding the log file."},
          {"log_filename", ValueType::String, true, std::nullopt, "Name of the log file."},
          {"level_filter", ValueType::String, false, std::nullopt,
           "Only return entries at this level (DEBUG, INFO, WARN, ERROR, FATAL)."},
          {"num_lines", ValueType::Integer, false, std::nullopt, "Return at most this many of the newest entries."}},
         Direction::Downlink,
         false,
         false},
        [](const Json& args, ToolContext&) {
            std::optional<int> lines;
            if (args.contains("num_lines")) {
                lines = args.at("num_lines").get<int>();
            }
            return read_log(args.at("log_file_directory").get<std::string>(),
                            args.at("log_filename").get<std::string>(), opt_string(args, "level_filter"), lines);
        });
}

void register_calculation_tools(ToolRegistry& registry) {
    registry.register_tool(
        {"add_all",
         "Returns the sum of numbers.",
         {{"numbers", ValueType::NumberList, true, std::nullopt, "Numbers to add."}},
         Direction::Downlink,
         false,
         false},
        [](const Json& args, ToolContext&) { return Json(add_all(numbers_of(args))); });

    registry.register_tool(
        {"mean",
         "Returns the mean and standard deviation of a list of numbers.",
         {{"numbers", ValueType::NumberList, true, std::nullopt, "At least two numbers."}},
         Direction::Downlink,
         false,
         false},
        [](const Json& args, ToolContext&) {
            const auto r = mean(numbers_of(args));
            return Json{{"mean", r.mean}, {"stdev", r.stdev}};
        });
}

}  // namespace rosa::toolkit
