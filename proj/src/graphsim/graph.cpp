#include "rosa/graphsim/graph.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <utility>

namespace rosa::graphsim {

namespace {

constexpr std::array<std::pair<LogLevel, std::string_view>, 5> kLevels{{
    {LogLevel::Debug, "DEBUG"},
    {LogLevel::Info, "INFO"},
    {LogLevel::Warn, "WARN"},
    {LogLevel::Error, "ERROR"},
    {LogLevel::Fatal, "FATAL"},
}};

bool is_segment_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

void require_valid(std::string_view name, std::string_view what) {
    if (!is_valid_name(name)) {
        throw GraphError(Errc::InvalidName, std::string("invalid ") + std::string(what) + " name '" +
                                                std::string(name) + "'");
    }
}

std::string sanitize(std::string_view text) {
    std::string out(text);
    std::replace_if(out.begin(), out.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
    return out;
}

}  // namespace

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::DuplicateNode: return "DuplicateNode";
        case Errc::InvalidName: return "InvalidName";
        case Errc::UnknownNode: return "UnknownNode";
        case Errc::UnknownTopic: return "UnknownTopic";
        case Errc::NotAPublisher: return "NotAPublisher";
        case Errc::TypeMismatch: return "TypeMismatch";
        case Errc::DuplicateService: return "DuplicateService";
        case Errc::UnknownService: return "UnknownService";
        case Errc::SchemaViolation: return "SchemaViolation";
        case Errc::UnknownKey: return "UnknownKey";
        case Errc::BadLevel: return "BadLevel";
        case Errc::Reentrancy: return "ReentrancyError";
    }
    return "GraphError";
}

std::string_view to_string(LogLevel level) {
    for (const auto& [l, name] : kLevels) {
        if (l == level) {
            return name;
        }
    }
    return "INFO";
}

std::optional<LogLevel> log_level_from_string(std::string_view name) {
    for (const auto& [l, n] : kLevels) {
        if (n == name) {
            return l;
        }
    }
    return std::nullopt;
}

bool is_valid_name(std::string_view name) {
    if (name.size() < 2 || name.front() != '/') {
        return false;
    }
    bool segment_open = false;
    for (std::size_t i = 1; i < name.size(); ++i) {
        const char c = name[i];
        if (c == '/') {
            if (!segment_open) {
                return false;
            }
            segment_open = false;
        } else if (is_segment_char(c)) {
            segment_open = true;
        } else {
            return false;
        }
    }
    return segment_open;
}

std::string format_log_line(const LogEntry& entry) {
    std::string line = std::to_string(entry.tick);
    line += '\t';
    line += to_string(entry.level);
    line += '\t';
    line += entry.node;
    line += '\t';
    line += entry.text;
    return line;
}

Json GraphSnapshot::to_json() const {
    Json topics_json = Json::array();
    for (const auto& t : topics) {
        topics_json.push_back({{"name", t.name}, {"type", t.message_type}});
    }
    return Json{{"clock", clock},
                {"nodes", nodes},
                {"params", param_keys},
                {"services", services},
                {"topics", std::move(topics_json)}};
}

Graph::Graph(GraphOptions options) : options_(std::move(options)) {
    if (options_.ring_depth == 0) {
        options_.ring_depth = 1;
    }
    if (options_.log_mirror) {
        const auto parent = options_.log_mirror->parent_path();
        if (!parent.empty()) {
            std::filesystem::create_directories(parent);
        }
        std::ofstream truncate(*options_.log_mirror, std::ios::binary | std::ios::trunc);
    }
}

Graph::TopicRecord& Graph::ensure_topic(const std::string& name, const std::string& type) {
    auto it = topics_.find(name);
    if (it == topics_.end()) {
        topic_order_.push_back(name);
        it = topics_.emplace(name, TopicRecord{name, type, {}, 0, {}, {}}).first;
    } else if (it->second.message_type.empty()) {
        it->second.message_type = type;
    }
    return it->second;
}

NodeHandle Graph::register_node(const std::string& name,
                                std::vector<TopicDecl> publications,
                                std::vector<SubscriptionDecl> subscriptions,
                                std::vector<ServiceDecl> services) {
    std::lock_guard lock(mutex_);
    require_valid(name, "node");
    if (nodes_.count(name) != 0) {
        throw GraphError(Errc::DuplicateNode, "node '" + name + "' is already registered");
    }
    // Validate everything first so a rejected registration leaves no trace.
    for (const auto& pub : publications) {
        require_valid(pub.name, "topic");
        if (pub.message_type.empty()) {
            throw GraphError(Errc::TypeMismatch, "publication of '" + pub.name + "' lacks a message type");
        }
        auto it = topics_.find(pub.name);
        if (it != topics_.end() && !it->second.message_type.empty() &&
            it->second.message_type != pub.message_type) {
            throw GraphError(Errc::TypeMismatch, "topic '" + pub.name + "' carries " + it->second.message_type +
                                                     ", not " + pub.message_type);
        }
    }
    for (const auto& sub : subscriptions) {
        require_valid(sub.topic, "topic");
    }
    std::set<std::string> new_services;
    for (const auto& svc : services) {
        require_valid(svc.name, "service");
        if (services_.count(svc.name) != 0 || !new_services.insert(svc.name).second) {
            throw GraphError(Errc::DuplicateService, "service '" + svc.name + "' already has a provider");
        }
        if (!svc.handler) {
            throw GraphError(Errc::UnknownService, "service '" + svc.name + "' has no handler");
        }
    }

    NodeRecord record{name, {}, {}, {}};
    for (auto& pub : publications) {
        auto& topic = ensure_topic(pub.name, pub.message_type);
        if (record.publications.insert(pub.name).second) {
            topic.publishers.push_back(name);
        }
    }
    for (auto& sub : subscriptions) {
        auto& topic = ensure_topic(sub.topic, sub.message_type);
        if (record.subscriptions.insert(sub.topic).second) {
            topic.subscribers.emplace_back(name, std::move(sub.callback));
        }
    }
    for (auto& svc : services) {
        record.provided_services.insert(svc.name);
        service_order_.push_back(svc.name);
        services_.emplace(svc.name, ServiceRecord{svc.name, std::move(svc.request_schema),
                                                  std::move(svc.handler), name, 0});
    }
    node_order_.push_back(name);
    nodes_.emplace(name, std::move(record));
    return NodeHandle(name);
}

Tick Graph::tick_locked() {
    return ++clock_;
}

Tick Graph::publish(const NodeHandle& node, std::string_view topic_name, Payload payload) {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(topic_name);
    if (it == topics_.end()) {
        throw GraphError(Errc::UnknownTopic, "unknown topic '" + std::string(topic_name) + "'");
    }
    auto node_it = nodes_.find(node.name());
    if (node_it == nodes_.end()) {
        throw GraphError(Errc::UnknownNode, "unknown node '" + node.name() + "'");
    }
    if (node_it->second.publications.count(std::string(topic_name)) == 0) {
        throw GraphError(Errc::NotAPublisher,
                         node.name() + " is not a publisher of '" + std::string(topic_name) + "'");
    }
    if (publishing_.count(topic_name) != 0) {
        throw GraphError(Errc::Reentrancy,
                         "re-entrant publish on '" + std::string(topic_name) + "' from a subscriber callback");
    }

    auto& topic = it->second;
    topic.buffer.push_back(payload);
    while (topic.buffer.size() > options_.ring_depth) {
        topic.buffer.pop_front();
    }
    ++topic.publish_count;
    const Tick tick = tick_locked();

    publishing_.insert(topic.name);
    struct Release {
        std::set<std::string, std::less<>>& set;
        std::string name;
        ~Release() { set.erase(name); }
    } release{publishing_, topic.name};

    // Copy so a callback registering a node cannot invalidate the iteration.
    const auto subscribers = topic.subscribers;
    for (const auto& [subscriber, callback] : subscribers) {
        if (callback) {
            callback(payload);
        }
    }
    return tick;
}

Payload Graph::call_service(std::string_view name, const Payload& request) {
    std::lock_guard lock(mutex_);
    auto it = services_.find(name);
    if (it == services_.end()) {
        throw GraphError(Errc::UnknownService, "unknown service '" + std::string(name) + "'");
    }
    auto& svc = it->second;
    const Payload req = request.is_null() ? Payload::object() : request;
    if (!req.is_object()) {
        throw GraphError(Errc::SchemaViolation, "request to '" + svc.name + "' must be an object");
    }
    for (const auto& [field, type] : svc.request_schema) {
        auto f = req.find(field);
        if (f == req.end()) {
            throw GraphError(Errc::SchemaViolation, "request to '" + svc.name + "' is missing field '" + field + "'");
        }
        if (!conforms(*f, type)) {
            throw GraphError(Errc::SchemaViolation, "field '" + field + "' of '" + svc.name + "' must be " +
                                                        std::string(to_string(type)));
        }
    }
    for (const auto& [field, value] : req.items()) {
        if (svc.request_schema.count(field) == 0) {
            throw GraphError(Errc::SchemaViolation, "request to '" + svc.name + "' has unexpected field '" + field + "'");
        }
    }
    ++svc.call_count;
    tick_locked();
    return svc.handler(req);
}

ParamResult Graph::param_access(ParamMode mode, const std::optional<std::string>& key,
                                const std::optional<Json>& value) {
    switch (mode) {
        case ParamMode::Get:
            if (!key) {
                throw GraphError(Errc::UnknownKey, "get requires a key");
            }
            return {param_get(*key), {}};
        case ParamMode::Set:
            if (!key || !value) {
                throw GraphError(Errc::UnknownKey, "set requires a key and a value");
            }
            param_set(*key, *value);
            return {*value, {}};
        case ParamMode::List:
            return {std::nullopt, param_list()};
    }
    return {};
}

Json Graph::param_get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = params_.find(key);
    if (it == params_.end()) {
        throw GraphError(Errc::UnknownKey, "unknown parameter '" + key + "'");
    }
    return it->second;
}

void Graph::param_set(const std::string& key, Json value) {
    std::lock_guard lock(mutex_);
    params_[key] = std::move(value);
    tick_locked();
}

std::vector<std::string> Graph::param_list() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> keys;
    keys.reserve(params_.size());
    for (const auto& [k, v] : params_) {
        keys.push_back(k);
    }
    return keys;
}

Tick Graph::log(std::string_view node, std::string_view level, std::string_view text) {
    const auto parsed = log_level_from_string(level);
    if (!parsed) {
        throw GraphError(Errc::BadLevel, "bad log level '" + std::string(level) + "'");
    }
    return log(node, *parsed, text);
}

Tick Graph::log(std::string_view node, LogLevel level, std::string_view text) {
    std::lock_guard lock(mutex_);
    if (nodes_.find(node) == nodes_.end()) {
        throw GraphError(Errc::UnknownNode, "unknown node '" + std::string(node) + "'");
    }
    LogEntry entry{tick_locked(), level, std::string(node), sanitize(text)};
    mirror_locked(entry);
    logs_.push_back(std::move(entry));
    return logs_.back().tick;
}

void Graph::mirror_locked(const LogEntry& entry) {
    if (!options_.log_mirror) {
        return;
    }
    std::ofstream out(*options_.log_mirror, std::ios::binary | std::ios::app);
    out << format_log_line(entry) << '\n';
}

GraphSnapshot Graph::snapshot() const {
    std::lock_guard lock(mutex_);
    GraphSnapshot snap;
    snap.nodes = node_order_;
    for (const auto& name : topic_order_) {
        snap.topics.push_back({name, topics_.find(name)->second.message_type});
    }
    snap.services = service_order_;
    for (const auto& [k, v] : params_) {
        snap.param_keys.push_back(k);
    }
    snap.clock = clock_;
    return snap;
}

std::vector<LogEntry> Graph::logs() const {
    std::lock_guard lock(mutex_);
    return logs_;
}

NodeRecord Graph::node(std::string_view name) const {
    std::lock_guard lock(mutex_);
    auto it = nodes_.find(name);
    if (it == nodes_.end()) {
        throw GraphError(Errc::UnknownNode, "unknown node '" + std::string(name) + "'");
    }
    return it->second;
}

std::vector<Payload> Graph::topic_buffer(std::string_view topic) const {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(topic);
    if (it == topics_.end()) {
        throw GraphError(Errc::UnknownTopic, "unknown topic '" + std::string(topic) + "'");
    }
    return {it->second.buffer.begin(), it->second.buffer.end()};
}

std::uint64_t Graph::publish_count(std::string_view topic) const {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(topic);
    if (it == topics_.end()) {
        throw GraphError(Errc::UnknownTopic, "unknown topic '" + std::string(topic) + "'");
    }
    return it->second.publish_count;
}

std::uint64_t Graph::service_call_count(std::string_view service) const {
    std::lock_guard lock(mutex_);
    auto it = services_.find(service);
    if (it == services_.end()) {
        throw GraphError(Errc::UnknownService, "unknown service '" + std::string(service) + "'");
    }
    return it->second.call_count;
}

Tick Graph::now() const {
    std::lock_guard lock(mutex_);
    return clock_;
}

Tick Graph::mark() {
    std::lock_guard lock(mutex_);
    return tick_locked();
}

}  // namespace rosa::graphsim
