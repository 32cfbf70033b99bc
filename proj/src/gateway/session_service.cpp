#include "rosa/gateway/session_service.hpp"

#include "rosa/kv_file.hpp"
#include "rosa/models/scripted_backend.hpp"

#include <fstream>

namespace rosa::gateway {

using agent::InvalidConfig;

Json SessionMetrics::to_json() const {
    return {{"interventions", interventions},
            {"tasks_completed", tasks_completed},
            {"incidents", incidents},
            {"turns", turns},
            {"breakdown", {{"approvals", approvals}, {"denials", denials}, {"overrides", overrides}, {"estops", estops}}}};
}

std::string TranscriptRecord::line() const {
    return canonical(Json{{"tick", tick}, {"kind", kind}, {"body", body}});
}

Transcript::Transcript(std::optional<std::filesystem::path> file) : file_(std::move(file)) {
    if (file_) {
        std::ofstream out(*file_, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write transcript " + file_->string());
        }
    }
}

void Transcript::write(const TranscriptRecord& record) {
    auto line = record.line();
    text_ += line;
    text_ += '\n';
    if (file_) {
        std::ofstream out(*file_, std::ios::app);
        out << line << '\n';
    }
    records_.push_back(std::move(record));
}

void Transcript::append(TranscriptRecord record) {
    std::lock_guard lock(mutex_);
    write(record);
}

void Transcript::append_with(const std::function<TranscriptRecord()>& build) {
    std::lock_guard lock(mutex_);
    write(build());
}

std::vector<TranscriptRecord> Transcript::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::string Transcript::text() const {
    std::lock_guard lock(mutex_);
    return text_;
}

namespace {

template <class T>
T get_as(const std::string& key, const Json& value) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!value.is_boolean()) {
                throw InvalidConfig(key + " must be true or false");
            }
            return value.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!value.is_number_integer() || (std::is_unsigned_v<T> && value.get<std::int64_t>() < 0)) {
                throw InvalidConfig(key + " must be a non-negative integer");
            }
            return value.get<T>();
        } else {
            if (!value.is_string()) {
                throw InvalidConfig(key + " must be a string");
            }
            return value.get<std::string>();
        }
    } catch (const Json::exception&) {
        throw InvalidConfig(key + " has the wrong type");
    }
}

}  // namespace

void SessionConfig::apply(const Json& overrides) {
    if (overrides.is_null()) {
        return;
    }
    if (!overrides.is_object()) {
        throw InvalidConfig("session config must be an object");
    }
    for (const auto& [key, value] : overrides.items()) {
        if (key == "agent.max_iterations") {
            if (!value.is_number_integer()) {
                throw InvalidConfig("agent.max_iterations must be a positive integer");
            }
            agent.max_iterations = value.get<int>();
        } else if (key == "agent.context_budget") {
            agent.context_budget = get_as<std::size_t>(key, value);
        } else if (key == "agent.scratchpad_budget") {
            agent.scratchpad_budget = get_as<std::size_t>(key, value);
        } else if (key == "agent.require_confirmation_for_uplink") {
            agent.require_confirmation_for_uplink = get_as<bool>(key, value);
        } else if (key == "agent.tick_duration_us") {
            agent.tick_duration = std::chrono::microseconds(get_as<std::uint64_t>(key, value));
        } else if (key.rfind("agent.delay_ticks.", 0) == 0) {
            agent.injected_delay_ticks[key.substr(18)] = get_as<std::uint64_t>(key, value);
        } else if (key == "model") {
            model_kind = get_as<std::string>(key, value);
            if (model_kind != "scripted" && model_kind != "remote") {
                throw InvalidConfig("model must be scripted or remote");
            }
        } else if (key == "model.script") {
            script = get_as<std::string>(key, value);
        } else if (key == "model.endpoint") {
            remote.endpoint = get_as<std::string>(key, value);
        } else if (key == "model.name") {
            remote.model = get_as<std::string>(key, value);
        } else if (key == "model.max_context_tokens") {
            auto caps = capabilities.value_or(remote.capabilities);
            caps.max_context_tokens = get_as<std::size_t>(key, value);
            capabilities = caps;
        } else if (key == "model.supports_tool_calling") {
            auto caps = capabilities.value_or(remote.capabilities);
            caps.supports_tool_calling = get_as<bool>(key, value);
            capabilities = caps;
        } else if (key.rfind("scenario.", 0) == 0) {
            scenario_overrides[key.substr(9)] = value;
        } else {
            throw InvalidConfig("unknown config key " + key);
        }
    }
}

Json overrides_from_kv(std::string_view text, const std::string& source) {
    auto doc = KvDocument::parse(text, source);
    Json out = Json::object();
    for (const auto& e : doc.entries()) {
        // Numbers and booleans keep their type; everything else is text.
        Json value = e.value;
        if (e.value == "true" || e.value == "false") {
            value = e.value == "true";
        } else if (auto n = parse_number(e.value)) {
            value = Json::parse(e.value);
        }
        out[e.key] = value;
    }
    return out;
}

Json overrides_from_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidConfig("cannot read config file " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return overrides_from_kv(text, path.string());
}

struct Session {
    std::string id;
    SessionConfig config;
    scenarios::World world;
    std::unique_ptr<models::ModelBackend> backend;
    std::unique_ptr<agent::Agent> agent;
    std::unique_ptr<Transcript> transcript;

    std::mutex turn_mutex;
    mutable std::mutex metrics_mutex;
    SessionMetrics metrics;
    // Any incident since the last user message; such a turn is not a completed task.
    bool turn_had_incident = false;

    template <class F>
    void count(F&& f) {
        std::lock_guard lock(metrics_mutex);
        f(metrics);
    }
};

namespace {

Json pending_json(const std::optional<agent::PendingConfirmation>& p) {
    if (!p) {
        return nullptr;
    }
    return {{"id", p->call_id}, {"tool", p->tool}, {"args", p->args}};
}

Json result_json(const toolkit::InvokeResult& r) {
    if (const auto* ok = std::get_if<toolkit::ToolResult>(&r)) {
        return {{"ok", true}, {"result", ok->payload}};
    }
    const auto& err = std::get<toolkit::ToolError>(r);
    return {{"ok", false}, {"error", err.code}, {"message", err.text()}};
}

// Bridges agent callbacks to stream events, transcript records and metrics.
class SessionObserver : public agent::TurnObserver {
public:
    SessionObserver(Session& s, const EventSink& sink) : s_(s), sink_(sink) {}

    void on_reasoning(int iteration, const std::string& text) override {
        emit({{"kind", "reasoning"}, {"iteration", iteration}, {"text", text}});
    }

    void on_action(int iteration, const agent::ToolCall& call) override {
        emit({{"kind", "action"},
              {"iteration", iteration},
              {"id", call.id},
              {"group", call.group},
              {"tool", call.name},
              {"args", call.args}});
    }

    void on_observation(int iteration, const agent::Observation& obs) override {
        Json event{{"kind", "observation"}, {"iteration", iteration}, {"id", obs.call_id},
                   {"tool", obs.tool},      {"is_error", obs.is_error}, {"content", obs.content}};
        if (obs.is_error) {
            event["error"] = obs.error_code;
            if (obs.error_code != agent::kConfirmationRequired) {
                s_.count([this](SessionMetrics& m) {
                    ++m.incidents;
                    s_.turn_had_incident = true;
                });
            }
        }
        emit(std::move(event));
    }

    void on_step(const agent::StepTrace& trace) override {
        s_.transcript->append({s_.world.graph->now(), "step", trace.to_json()});
    }

    void on_tool_executed(const agent::ToolExecution& ex) override {
        Json body{{"origin", agent::to_string(ex.origin)}, {"id", ex.call.id},       {"tool", ex.call.name},
                  {"args", ex.call.args},                  {"is_error", ex.observation.is_error},
                  {"content", ex.observation.content}};
        s_.transcript->append({s_.world.graph->now(), "tool", std::move(body)});
    }

    void emit(Json event) {
        if (sink_) {
            sink_(event);
        }
        events.push_back(std::move(event));
    }

    std::vector<Json> events;

private:
    Session& s_;
    const EventSink& sink_;
};

std::vector<Json> error_turn(Session& s, SessionObserver& obs, const std::string& code, const std::string& message) {
    s.transcript->append({s.world.graph->now(), "assistant", {{"error", code}, {"message", message}}});
    obs.emit({{"kind", "error"}, {"error", code}, {"message", message}});
    return std::move(obs.events);
}

}  // namespace

SessionService::SessionService(scenarios::ScenarioCatalog catalog, Options options)
    : catalog_(std::move(catalog)), options_(std::move(options)) {
    if (options_.log_dir) {
        std::filesystem::create_directories(*options_.log_dir);
    }
}

SessionService::~SessionService() = default;

std::string SessionService::create_session(const std::string& scenario, const Json& overrides) {
    auto def = catalog_.get(scenario);
    SessionConfig config = options_.defaults;
    config.apply(overrides);
    config.agent.validate();
    for (const auto& [key, value] : config.scenario_overrides.items()) {
        try {
            def.apply_override(key, value);
        } catch (const scenarios::ScenarioError& e) {
            throw InvalidConfig(e.what());
        }
    }

    std::unique_ptr<models::ModelBackend> backend;
    if (config.model_kind == "remote") {
        if (config.remote.endpoint.empty()) {
            throw InvalidConfig("model.endpoint is required for the remote model");
        }
        if (config.capabilities) {
            config.remote.capabilities = *config.capabilities;
        }
        backend = std::make_unique<models::RemoteBackend>(config.remote);
    } else {
        auto script = config.script ? config.script : def.script;
        if (!script) {
            throw InvalidConfig("scenario " + def.name + " has no script; set model.script");
        }
        try {
            backend = std::make_unique<models::ScriptedBackend>(
                models::Script::load(*script), config.capabilities.value_or(models::ModelCapabilities{true, 128000}));
        } catch (const models::ScriptError& e) {
            throw InvalidConfig(e.what());
        }
    }
    const auto caps = backend->capabilities();
    if (auto reason = models::validate_model(caps)) {
        throw InvalidConfig(*reason);
    }
    if (config.agent.context_budget > caps.max_context_tokens) {
        throw InvalidConfig("agent.context_budget exceeds the model context length of " +
                            std::to_string(caps.max_context_tokens) + " tokens");
    }

    std::string id;
    {
        std::lock_guard lock(sessions_mutex_);
        id = "s" + std::to_string(next_id_++);
    }

    auto s = std::make_shared<Session>();
    s->id = id;
    scenarios::WorldOptions wopts;
    wopts.scratchpad_budget = config.agent.scratchpad_budget;
    std::optional<std::filesystem::path> transcript_file;
    if (options_.log_dir) {
        wopts.log_mirror = *options_.log_dir / (id + ".graph.log");
        transcript_file = *options_.log_dir / (id + ".transcript.jsonl");
    }
    s->world = scenarios::build_world(def, wopts);
    s->backend = std::move(backend);
    s->agent = std::make_unique<agent::Agent>(config.agent, def.rsp, s->world.registry, *s->backend,
                                              *s->world.graph, s->world.scratchpad);
    s->transcript = std::make_unique<Transcript>(transcript_file);
    s->config = std::move(config);

    Json body{{"id", id},
              {"scenario", def.name},
              {"robot", def.robot},
              {"model", s->config.model_kind},
              {"max_iterations", s->config.agent.max_iterations},
              {"context_budget", s->config.agent.context_budget}};
    s->transcript->append({s->world.graph->now(), "session", std::move(body)});

    std::lock_guard lock(sessions_mutex_);
    sessions_[id] = std::move(s);
    return id;
}

std::shared_ptr<Session> SessionService::find(const std::string& id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw UnknownSession(id);
    }
    return it->second;
}

SessionService::TurnLease SessionService::lease(const std::string& id) {
    auto s = find(id);
    std::unique_lock lock(s->turn_mutex, std::try_to_lock);
    if (!lock.owns_lock()) {
        throw SessionBusy();
    }
    return TurnLease(std::move(s), std::move(lock));
}

std::vector<Json> SessionService::post_message(const std::string& id, const std::string& text,
                                               const std::optional<std::string>& language, const EventSink& sink) {
    return post_message(lease(id), text, language, sink);
}

std::vector<Json> SessionService::post_message(TurnLease lease, const std::string& text,
                                               const std::optional<std::string>& language, const EventSink& sink) {
    Session& s = *lease.session_;
    if (auto stale = s.agent->safety().pending()) {
        s.transcript->append(
            {s.world.graph->now(), "safety", {{"event", "pending_discarded"}, {"pending", pending_json(stale)}}});
    }
    s.count([&s](SessionMetrics& m) {
        ++m.turns;
        s.turn_had_incident = false;
    });
    Json body{{"text", text}};
    if (language) {
        body["language"] = *language;
    }
    s.transcript->append({s.world.graph->now(), "user", std::move(body)});

    SessionObserver observer(s, sink);
    try {
        auto result = s.agent->run_turn(text, agent::TurnOptions{language}, &observer);
        return finish_turn(s, result, std::move(observer.events), sink);
    } catch (const models::ModelError& e) {
        return error_turn(s, observer, "ModelBackendUnavailable", std::string(e.code()) + ": " + e.what());
    } catch (const agent::BudgetTooSmall& e) {
        return error_turn(s, observer, "BudgetTooSmall", e.what());
    }
}

std::vector<Json> SessionService::confirm(const std::string& id, agent::Decision decision, const EventSink& sink) {
    return confirm(lease(id), decision, sink);
}

std::vector<Json> SessionService::confirm(TurnLease lease, agent::Decision decision, const EventSink& sink) {
    Session& s = *lease.session_;
    auto pending = s.agent->safety().pending();
    if (!pending) {
        throw agent::NoPendingConfirmation();
    }
    const bool approve = decision == agent::Decision::Approve;
    s.transcript->append({s.world.graph->now(),
                          "safety",
                          {{"event", "confirm"},
                           {"decision", approve ? "approve" : "deny"},
                           {"pending", pending_json(pending)}}});
    s.count([approve](SessionMetrics& m) {
        ++m.interventions;
        ++(approve ? m.approvals : m.denials);
    });

    SessionObserver observer(s, sink);
    try {
        auto result = s.agent->confirm_action(decision, &observer);
        return finish_turn(s, result, std::move(observer.events), sink);
    } catch (const models::ModelError& e) {
        return error_turn(s, observer, "ModelBackendUnavailable", std::string(e.code()) + ": " + e.what());
    } catch (const agent::BudgetTooSmall& e) {
        return error_turn(s, observer, "BudgetTooSmall", e.what());
    }
}

std::vector<Json> SessionService::finish_turn(Session& s, const agent::TurnResult& result, std::vector<Json> events,
                                              const EventSink& sink) {
    s.count([&](SessionMetrics& m) {
        if (result.status == agent::TurnStatus::Completed && !s.turn_had_incident) {
            ++m.tasks_completed;
        }
    });
    s.transcript->append({s.world.graph->now(),
                          "assistant",
                          {{"text", result.final_answer},
                           {"status", agent::to_string(result.status)},
                           {"pending_confirmation", pending_json(result.pending)}}});
    Json final_event{{"kind", "final"},
                     {"text", result.final_answer},
                     {"status", agent::to_string(result.status)},
                     {"pending_confirmation", pending_json(result.pending)}};
    if (sink) {
        sink(final_event);
    }
    events.push_back(std::move(final_event));
    return events;
}

graphsim::Tick SessionService::estop(const std::string& id) {
    auto s = find(id);
    graphsim::Tick ack = 0;
    // The record is built under the transcript lock, so every tool record
    // written after the stop lands after this one.
    s->transcript->append_with([&] {
        ack = s->agent->estop();
        return TranscriptRecord{ack, "safety", {{"event", "estop"}, {"ack_tick", ack}}};
    });
    s->count([](SessionMetrics& m) {
        ++m.interventions;
        ++m.estops;
    });
    return ack;
}

void SessionService::reset_estop(const std::string& id) {
    auto s = find(id);
    s->agent->reset_estop();
    s->transcript->append({s->world.graph->now(), "safety", {{"event", "reset_estop"}}});
}

toolkit::InvokeResult SessionService::override_tool(const std::string& id, const std::string& tool, const Json& args) {
    auto s = find(id);
    auto result = s->agent->human_override(tool, args);
    std::string code;
    if (const auto* err = std::get_if<toolkit::ToolError>(&result)) {
        code = err->code;
    }
    const bool refused = code == "UnknownTool" || code == "NotUplink" || code == "ArgValidation" || code == "EStopped";
    Json body{{"origin", "human"}, {"tool", tool}, {"args", args}, {"executed", !refused}};
    body.update(result_json(result));
    s->transcript->append({s->world.graph->now(), "override", std::move(body)});
    s->count([&](SessionMetrics& m) {
        if (!refused) {
            ++m.interventions;
            ++m.overrides;
        }
        if (code == "EStopped" || (!refused && !code.empty())) {
            ++m.incidents;
        }
    });
    return result;
}

std::string SessionService::export_transcript(const std::string& id) const {
    return find(id)->transcript->text();
}

SessionMetrics SessionService::metrics(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->metrics_mutex);
    return s->metrics;
}

Json SessionService::state(const std::string& id) const {
    auto s = find(id);
    auto safety = s->agent->safety().state();
    return {{"id", id},
            {"scenario", s->world.def.name},
            {"estopped", safety.estopped},
            {"pending_confirmation", pending_json(safety.pending_confirmation)},
            {"human_override_active", safety.human_override_active},
            {"robot", s->world.robot->state_json()},
            {"tick", s->world.graph->now()}};
}

agent::Agent& SessionService::agent(const std::string& id) {
    return *find(id)->agent;
}

scenarios::World& SessionService::world(const std::string& id) {
    return find(id)->world;
}

}  // namespace rosa::gateway
