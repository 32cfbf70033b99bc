#pragma once

#include "rosa/agent/agent.hpp"
#include "rosa/models/remote_backend.hpp"
#include "rosa/scenarios/world.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rosa::gateway {

class UnknownSession : public std::runtime_error {
public:
    explicit UnknownSession(const std::string& id) : std::runtime_error("unknown session: " + id) {}
};

class SessionBusy : public std::runtime_error {
public:
    SessionBusy() : std::runtime_error("session is busy with another turn") {}
};

struct SessionMetrics {
    std::uint64_t interventions = 0;
    std::uint64_t tasks_completed = 0;
    std::uint64_t incidents = 0;
    std::uint64_t turns = 0;
    // Breakdown of interventions.
    std::uint64_t approvals = 0;
    std::uint64_t denials = 0;
    std::uint64_t overrides = 0;
    std::uint64_t estops = 0;

    Json to_json() const;
};

struct TranscriptRecord {
    graphsim::Tick tick = 0;
    std::string kind;  // session|user|assistant|step|tool|safety|override
    Json body;

    // One JSON line, sorted keys.
    std::string line() const;
};

// Append-only JSONL record of a session, mirrored to a file when one is set.
class Transcript {
public:
    explicit Transcript(std::optional<std::filesystem::path> file = std::nullopt);

    void append(TranscriptRecord record);
    // Builds and appends a record while holding the transcript lock, so no
    // other record can land between the build and the append.
    void append_with(const std::function<TranscriptRecord()>& build);

    std::vector<TranscriptRecord> records() const;
    std::string text() const;

private:
    void write(const TranscriptRecord& record);

    mutable std::mutex mutex_;
    std::optional<std::filesystem::path> file_;
    std::vector<TranscriptRecord> records_;
    std::string text_;
};

// Session configuration overrides, as flat dotted keys:
//   agent.max_iterations, agent.context_budget, agent.scratchpad_budget,
//   agent.require_confirmation_for_uplink, agent.tick_duration_us,
//   agent.delay_ticks.<tool>, model (scripted|remote), model.script,
//   model.endpoint, model.name, model.max_context_tokens,
//   model.supports_tool_calling, scenario.<constant>
struct SessionConfig {
    agent::AgentConfig agent;
    std::string model_kind = "scripted";
    std::optional<std::filesystem::path> script;
    models::RemoteConfig remote;
    std::optional<models::ModelCapabilities> capabilities;
    Json scenario_overrides = Json::object();

    // Applies `overrides` on top of this config. Throws agent::InvalidConfig.
    void apply(const Json& overrides);
};

using EventSink = std::function<void(const Json& event)>;

struct Session;

class SessionService {
public:
    struct Options {
        std::optional<std::filesystem::path> log_dir;
        SessionConfig defaults;
    };

    SessionService(scenarios::ScenarioCatalog catalog, Options options);
    ~SessionService();

    std::vector<std::string> scenario_names() const { return catalog_.names(); }

    // Throws scenarios::UnknownScenario and agent::InvalidConfig.
    std::string create_session(const std::string& scenario, const Json& overrides = Json::object());

    // Exclusive right to run one turn; throws SessionBusy.
    class TurnLease {
    public:
        TurnLease(TurnLease&&) noexcept = default;

    private:
        friend class SessionService;
        TurnLease(std::shared_ptr<Session> session, std::unique_lock<std::mutex> lock)
            : session_(std::move(session)), lock_(std::move(lock)) {}
        std::shared_ptr<Session> session_;
        std::unique_lock<std::mutex> lock_;
    };
    TurnLease lease(const std::string& id);

    // Streams reasoning/action/observation events, then one final or error
    // event. Returns the events.
    std::vector<Json> post_message(const std::string& id, const std::string& text,
                                   const std::optional<std::string>& language = std::nullopt,
                                   const EventSink& sink = {});
    std::vector<Json> post_message(TurnLease lease, const std::string& text,
                                   const std::optional<std::string>& language, const EventSink& sink);

    // Throws agent::NoPendingConfirmation.
    std::vector<Json> confirm(const std::string& id, agent::Decision decision, const EventSink& sink = {});
    std::vector<Json> confirm(TurnLease lease, agent::Decision decision, const EventSink& sink);

    // Returns the acknowledgement tick.
    graphsim::Tick estop(const std::string& id);
    void reset_estop(const std::string& id);
    toolkit::InvokeResult override_tool(const std::string& id, const std::string& tool, const Json& args);

    std::string export_transcript(const std::string& id) const;
    SessionMetrics metrics(const std::string& id) const;
    // Safety state and robot state.
    Json state(const std::string& id) const;

    // Direct access for tests and tooling.
    agent::Agent& agent(const std::string& id);
    scenarios::World& world(const std::string& id);

private:
    std::shared_ptr<Session> find(const std::string& id) const;
    std::vector<Json> finish_turn(Session& s, const agent::TurnResult& result, std::vector<Json> events,
                                  const EventSink& sink);

    scenarios::ScenarioCatalog catalog_;
    Options options_;
    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

// Reads a key-value config file into override form.
Json overrides_from_config(const std::filesystem::path& path);
Json overrides_from_kv(std::string_view text, const std::string& source = "<config>");

}  // namespace rosa::gateway
