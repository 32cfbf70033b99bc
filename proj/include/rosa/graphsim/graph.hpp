#pragma once

// Deterministic in-process stand-in for the ROS graph: nodes, topics,
// services, parameters and logs behind one guard, driven by a logical clock.

#include "rosa/value_type.hpp"

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rosa::graphsim {

using Tick = std::uint64_t;
using Payload = Json;

enum class Errc {
    DuplicateNode,
    InvalidName,
    UnknownNode,
    UnknownTopic,
    NotAPublisher,
    TypeMismatch,
    DuplicateService,
    UnknownService,
    SchemaViolation,
    UnknownKey,
    BadLevel,
    Reentrancy,
};

std::string_view to_string(Errc code);

class GraphError : public std::runtime_error {
public:
    GraphError(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

enum class LogLevel { Debug, Info, Warn, Error, Fatal };

std::string_view to_string(LogLevel level);
std::optional<LogLevel> log_level_from_string(std::string_view name);

// Leading '/', segments of [A-Za-z0-9_]+ separated by single '/'.
bool is_valid_name(std::string_view name);

using SubscriberCallback = std::function<void(const Payload&)>;
using ServiceHandler = std::function<Payload(const Payload& request)>;
using RequestSchema = std::map<std::string, ValueType>;

struct TopicDecl {
    std::string name;
    std::string message_type;
};

struct SubscriptionDecl {
    std::string topic;
    SubscriberCallback callback;
    // Used only when the topic does not exist yet.
    std::string message_type;
};

struct ServiceDecl {
    std::string name;
    RequestSchema request_schema;
    ServiceHandler handler;
};

struct NodeRecord {
    std::string name;
    std::set<std::string> publications;
    std::set<std::string> subscriptions;
    std::set<std::string> provided_services;
};

struct LogEntry {
    Tick tick = 0;
    LogLevel level = LogLevel::Info;
    std::string node;
    std::string text;

    bool operator==(const LogEntry&) const = default;
};

// Formats an entry exactly as the mirrored log file stores it, without the
// trailing newline.
std::string format_log_line(const LogEntry& entry);

struct TopicInfo {
    std::string name;
    std::string message_type;

    bool operator==(const TopicInfo&) const = default;
};

// Value copy of everything introspectable. Nodes, topics and services are
// listed in registration order; parameter keys are sorted.
struct GraphSnapshot {
    std::vector<std::string> nodes;
    std::vector<TopicInfo> topics;
    std::vector<std::string> services;
    std::vector<std::string> param_keys;
    Tick clock = 0;

    Json to_json() const;
    bool operator==(const GraphSnapshot&) const = default;
};

class NodeHandle {
public:
    const std::string& name() const noexcept { return name_; }

private:
    friend class Graph;
    explicit NodeHandle(std::string name) : name_(std::move(name)) {}
    std::string name_;
};

struct GraphOptions {
    std::size_t ring_depth = 10;
    // When set, every log entry is also appended to this file.
    std::optional<std::filesystem::path> log_mirror;
};

enum class ParamMode { Get, Set, List };

struct ParamResult {
    std::optional<Json> value;
    std::vector<std::string> keys;
};

class Graph {
public:
    explicit Graph(GraphOptions options = {});

    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    NodeHandle register_node(const std::string& name,
                             std::vector<TopicDecl> publications = {},
                             std::vector<SubscriptionDecl> subscriptions = {},
                             std::vector<ServiceDecl> services = {});

    // Runs every subscriber callback of `topic` once, in subscription order,
    // before returning. Advances the clock by one.
    Tick publish(const NodeHandle& node, std::string_view topic, Payload payload);

    Payload call_service(std::string_view service, const Payload& request);

    ParamResult param_access(ParamMode mode,
                             const std::optional<std::string>& key = std::nullopt,
                             const std::optional<Json>& value = std::nullopt);
    Json param_get(const std::string& key) const;
    void param_set(const std::string& key, Json value);
    std::vector<std::string> param_list() const;

    Tick log(std::string_view node, LogLevel level, std::string_view text);
    Tick log(std::string_view node, std::string_view level, std::string_view text);

    GraphSnapshot snapshot() const;
    std::vector<LogEntry> logs() const;
    NodeRecord node(std::string_view name) const;

    // Buffered payloads, oldest first.
    std::vector<Payload> topic_buffer(std::string_view topic) const;
    std::uint64_t publish_count(std::string_view topic) const;
    std::uint64_t service_call_count(std::string_view service) const;

    Tick now() const;
    // Advances the clock by one without touching any entity; used to stamp
    // out-of-band events such as an e-stop acknowledgement.
    Tick mark();
    const GraphOptions& options() const noexcept { return options_; }

private:
    struct TopicRecord {
        std::string name;
        std::string message_type;
        std::deque<Payload> buffer;
        std::uint64_t publish_count = 0;
        std::vector<std::string> publishers;
        std::vector<std::pair<std::string, SubscriberCallback>> subscribers;
    };

    struct ServiceRecord {
        std::string name;
        RequestSchema request_schema;
        ServiceHandler handler;
        std::string provider;
        std::uint64_t call_count = 0;
    };

    TopicRecord& ensure_topic(const std::string& name, const std::string& type);
    Tick tick_locked();
    void mirror_locked(const LogEntry& entry);

    GraphOptions options_;
    mutable std::recursive_mutex mutex_;
    Tick clock_ = 0;
    std::vector<std::string> node_order_;
    std::map<std::string, NodeRecord, std::less<>> nodes_;
    std::vector<std::string> topic_order_;
    std::map<std::string, TopicRecord, std::less<>> topics_;
    std::vector<std::string> service_order_;
    std::map<std::string, ServiceRecord, std::less<>> services_;
    std::map<std::string, Json, std::less<>> params_;
    std::vector<LogEntry> logs_;
    std::set<std::string, std::less<>> publishing_;
};

}  // namespace rosa::graphsim
