#include "rosa/agent/agent.hpp"

namespace rosa::agent {

std::string_view to_string(TurnStatus status) {
    switch (status) {
        case TurnStatus::Completed: return "completed";
        case TurnStatus::AwaitingConfirmation: return "awaiting_confirmation";
        case TurnStatus::IterationLimit: return "iteration_limit";
        case TurnStatus::Malformed: return "malformed";
    }
    return "completed";
}

Json StepTrace::to_json() const {
    Json actions_json = Json::array();
    for (const auto& a : actions) {
        actions_json.push_back({{"id", a.id}, {"group", a.group}, {"name", a.name}, {"args", a.args}});
    }
    Json observations_json = Json::array();
    for (const auto& o : observations) {
        observations_json.push_back({{"id", o.call_id}, {"tool", o.tool}, {"is_error", o.is_error}, {"content", o.content}});
    }
    Json timings_json = Json::array();
    for (const auto& t : timings) {
        timings_json.push_back({{"start_tick", t.start_tick}, {"end_tick", t.end_tick}});
    }
    return {{"iteration", iteration},     {"reasoning", reasoning}, {"actions", actions_json},
            {"observations", observations_json}, {"timings", timings_json}, {"phases", phases}};
}

void register_scratchpad_tool(toolkit::ToolRegistry& registry,
                              std::shared_ptr<Scratchpad> scratchpad,
                              graphsim::Graph& graph) {
    toolkit::ToolSpec spec;
    spec.name = "set_scratchpad";
    spec.description =
        "Replace your scratchpad notes. The scratchpad persists across turns; keep plans short, older text is "
        "dropped first when it overflows.";
    spec.params = {{"text", ValueType::String, true, std::nullopt, "The full new scratchpad text."}};
    registry.register_tool(spec, [scratchpad, &graph](const Json& args, toolkit::ToolContext&) {
        scratchpad->set(args.at("text").get<std::string>(), graph.now());
        return Json{{"scratchpad", scratchpad->text()}};
    });
}

Agent::Agent(AgentConfig config,
             RobotSystemPrompts prompts,
             std::shared_ptr<const toolkit::ToolRegistry> registry,
             models::ModelBackend& backend,
             graphsim::Graph& graph,
             std::shared_ptr<Scratchpad> scratchpad)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      backend_(backend),
      graph_(graph),
      scratchpad_(std::move(scratchpad)),
      safety_(graph) {
    config_.validate();
    if (!registry_ || !registry_->sealed()) {
        throw InvalidConfig("the tool registry must be sealed before the session starts");
    }
    if (!scratchpad_) {
        scratchpad_ = std::make_shared<Scratchpad>(config_.scratchpad_budget);
    }
    for (auto& p : prompts) {
        rsp_.push_back({Role::System, std::move(p), 0});
    }
    catalog_ = registry_->render_catalog();
}

ChatHistory Agent::history() const {
    std::lock_guard lock(data_mutex_);
    return history_;
}

std::optional<ContextDocument> Agent::last_context() const {
    std::lock_guard lock(data_mutex_);
    return last_context_;
}

void Agent::append(Role role, std::string content) {
    std::lock_guard lock(data_mutex_);
    history_.append({role, std::move(content), graph_.now()});
}

ContextDocument Agent::assemble() const {
    std::vector<Message> rsp = rsp_;
    std::vector<Message> history;
    {
        std::lock_guard lock(data_mutex_);
        if (language_) {
            rsp.push_back({Role::System, "respond in " + *language_, 0});
        }
        history = history_.messages();
    }
    return assemble_context(rsp, catalog_, scratchpad_->text(), history, config_.context_budget);
}

ExecOptions Agent::exec_options(TurnObserver* observer) const {
    ExecOptions opts;
    opts.require_confirmation = config_.require_confirmation_for_uplink;
    opts.delay_ticks = config_.injected_delay_ticks;
    opts.tick_duration = config_.tick_duration;
    if (observer) {
        opts.on_executed = [observer](const ToolExecution& e) { observer->on_tool_executed(e); };
    }
    return opts;
}

TurnResult Agent::finish(TurnResult result, TurnStatus status, std::string answer) {
    append(Role::Assistant, answer);
    result.status = status;
    result.final_answer = std::move(answer);
    result.pending = safety_.pending();
    return result;
}

TurnResult Agent::run_turn(std::string_view user_message, const TurnOptions& options, TurnObserver* observer) {
    std::unique_lock turn(turn_mutex_, std::try_to_lock);
    if (!turn.owns_lock()) {
        throw AgentBusy();
    }
    // A new request supersedes an unanswered confirmation.
    safety_.take_pending();
    {
        std::lock_guard lock(data_mutex_);
        language_ = options.language;
    }
    append(Role::User, std::string(user_message));
    return loop(1, observer, {});
}

TurnResult Agent::loop(int first_iteration, TurnObserver* observer, TurnResult result) {
    for (int iteration = first_iteration; iteration <= config_.max_iterations; ++iteration) {
        auto doc = assemble();
        {
            std::lock_guard lock(data_mutex_);
            last_context_ = doc;
        }
        models::ModelRequest request{doc.messages(), catalog_, registry_->catalog()};
        auto parsed = parse_model_output(backend_.complete(request).content);

        if (const auto* bad = std::get_if<Malformed>(&parsed)) {
            request.messages.push_back({Role::User,
                                        "Your previous reply could not be parsed (" + bad->diagnostic +
                                            "). Reply with plain text for a final answer or with a valid "
                                            "tool_calls object.",
                                        graph_.now()});
            parsed = parse_model_output(backend_.complete(request).content);
            if (const auto* again = std::get_if<Malformed>(&parsed)) {
                return finish(std::move(result), TurnStatus::Malformed,
                              "I could not produce a well-formed response: " + again->diagnostic);
            }
        }
        if (auto* answer = std::get_if<FinalAnswer>(&parsed)) {
            const auto status = safety_.pending() ? TurnStatus::AwaitingConfirmation : TurnStatus::Completed;
            return finish(std::move(result), status, std::move(answer->text));
        }

        const auto& batch = std::get<ToolCallBatch>(parsed);
        StepTrace trace;
        trace.iteration = iteration;
        trace.reasoning = batch.reasoning;
        trace.actions = batch.calls();
        if (observer) {
            observer->on_reasoning(iteration, trace.reasoning);
            for (const auto& call : trace.actions) {
                observer->on_action(iteration, call);
            }
        }
        append(Role::Assistant, to_wire(batch));

        auto outcome = execute_batch(batch, *registry_, safety_, exec_options(observer), exec_clock_);
        for (const auto& obs : outcome.observations) {
            append(Role::Tool, obs.content);
            if (observer) {
                observer->on_observation(iteration, obs);
            }
        }
        trace.observations = std::move(outcome.observations);
        trace.timings = std::move(outcome.timings);
        if (observer) {
            observer->on_step(trace);
        }
        result.steps.push_back(std::move(trace));
    }
    return finish(std::move(result), TurnStatus::IterationLimit,
                  "I stopped after reaching the iteration limit of " + std::to_string(config_.max_iterations) +
                      " steps without a final answer.");
}

TurnResult Agent::confirm_action(Decision decision, TurnObserver* observer) {
    std::unique_lock turn(turn_mutex_, std::try_to_lock);
    if (!turn.owns_lock()) {
        throw AgentBusy();
    }
    auto pending = safety_.take_pending();
    if (!pending) {
        throw NoPendingConfirmation();
    }
    const bool approve = decision == Decision::Approve;
    ToolCall call{pending->call_id + (approve ? "-approved" : "-denied"), 0, pending->tool, pending->args};
    ToolCallBatch batch;
    batch.reasoning = std::string(approve ? "Operator approved " : "Operator denied ") + call.name + ".";
    batch.groups = {{call}};

    StepTrace trace;
    trace.iteration = 1;
    trace.reasoning = batch.reasoning;
    trace.actions = {call};
    if (observer) {
        observer->on_reasoning(1, trace.reasoning);
        observer->on_action(1, call);
    }
    append(Role::Assistant, to_wire(batch));

    if (approve) {
        auto opts = exec_options(observer);
        opts.require_confirmation = false;
        if (observer) {
            opts.on_executed = [observer](ToolExecution e) {
                e.origin = Origin::Operator;
                observer->on_tool_executed(e);
            };
        }
        auto outcome = execute_batch(batch, *registry_, safety_, opts, exec_clock_);
        trace.observations = std::move(outcome.observations);
        trace.timings = std::move(outcome.timings);
    } else {
        trace.observations = {
            Observation::failure(call, {std::string(kDenied), "action denied by operator", {}})};
        trace.timings = {CallTiming{exec_clock_, exec_clock_, std::chrono::steady_clock::now(),
                                    std::chrono::steady_clock::now()}};
    }
    for (const auto& obs : trace.observations) {
        append(Role::Tool, obs.content);
        if (observer) {
            observer->on_observation(1, obs);
        }
    }
    if (observer) {
        observer->on_step(trace);
    }
    TurnResult result;
    result.steps.push_back(std::move(trace));
    return loop(2, observer, std::move(result));
}

graphsim::Tick Agent::estop() {
    return safety_.estop();
}

void Agent::reset_estop() {
    safety_.reset_estop();
}

toolkit::InvokeResult Agent::human_override(std::string_view tool, const Json& args, TurnObserver* observer) {
    const auto* spec = registry_->find(tool);
    if (!spec) {
        return toolkit::ToolError{"UnknownTool", "no tool named " + std::string(tool), {}};
    }
    if (spec->direction != toolkit::Direction::Uplink) {
        return toolkit::ToolError{"NotUplink", spec->name + " is not an uplink tool", {}};
    }
    auto validated = registry_->validate(*spec, args);
    if (auto* err = std::get_if<toolkit::ToolError>(&validated)) {
        return *err;
    }
    if (safety_.estopped()) {
        return toolkit::ToolError{"EStopped", "e-stopped: " + spec->name + " was not executed", {}};
    }

    SafetyController::OverrideScope scope(safety_);
    toolkit::ToolContext ctx;
    ctx.gate = &safety_;
    ctx.stop = safety_.stop_token();
    ctx.tick_duration = config_.tick_duration;
    auto result = registry_->invoke(tool, args, ctx);
    if (observer) {
        ToolCall call{"override", 0, spec->name, std::get<Json>(validated)};
        observer->on_tool_executed({Origin::Human, call, Observation::from(call, result)});
    }
    return result;
}

}  // namespace rosa::agent
