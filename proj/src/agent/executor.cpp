#include "rosa/agent/executor.hpp"

#include <algorithm>
#include <optional>
#include <thread>

namespace rosa::agent {

std::string_view to_string(Origin origin) {
    switch (origin) {
        case Origin::Agent: return "agent";
        case Origin::Human: return "human";
        case Origin::Operator: return "operator";
    }
    return "agent";
}

Observation Observation::from(const ToolCall& call, const toolkit::InvokeResult& result) {
    if (const auto* err = std::get_if<toolkit::ToolError>(&result)) {
        return failure(call, *err);
    }
    const auto& ok = std::get<toolkit::ToolResult>(result);
    Observation obs;
    obs.call_id = call.id;
    obs.tool = call.name;
    obs.result = ok.payload;
    obs.content = observation_result(call.id, ok.payload);
    return obs;
}

Observation Observation::failure(const ToolCall& call, toolkit::ToolError error) {
    Observation obs;
    obs.call_id = call.id;
    obs.tool = call.name;
    obs.is_error = true;
    obs.error_code = error.code;
    obs.content = observation_error(call.id, error.text());
    return obs;
}

namespace {

struct Slot {
    std::optional<Observation> observation;
    CallTiming timing;
};

void run_call(const ToolCall& call,
              const toolkit::ToolRegistry& registry,
              SafetyController& safety,
              const ExecOptions& options,
              std::uint64_t start,
              Slot& slot) {
    const auto* spec = registry.find(call.name);
    if (spec && spec->direction == toolkit::Direction::Uplink) {
        safety.wait_for_overrides();
    }
    toolkit::ToolContext ctx;
    ctx.gate = &safety;
    ctx.stop = safety.stop_token();
    ctx.tick_duration = options.tick_duration;

    slot.timing.wall_start = std::chrono::steady_clock::now();
    if (auto it = options.delay_ticks.find(call.name); it != options.delay_ticks.end()) {
        ctx.delay(it->second);
    }
    auto result = registry.invoke(call.name, call.args, ctx);
    slot.timing.wall_end = std::chrono::steady_clock::now();
    slot.timing.start_tick = start;
    slot.timing.end_tick = start + std::max<std::uint64_t>(1, ctx.elapsed_ticks);
    slot.observation = Observation::from(call, result);
    if (options.on_executed) {
        options.on_executed(ToolExecution{Origin::Agent, call, *slot.observation});
    }
}

}  // namespace

BatchOutcome execute_batch(const ToolCallBatch& batch,
                           const toolkit::ToolRegistry& registry,
                           SafetyController& safety,
                           const ExecOptions& options,
                           std::uint64_t& clock) {
    BatchOutcome out;
    for (const auto& group : batch.groups) {
        const std::uint64_t start = clock;
        std::vector<Slot> slots(group.size());
        std::vector<std::size_t> launch;

        // Gating is decided in call order before anything in the group runs.
        for (std::size_t i = 0; i < group.size(); ++i) {
            const auto& call = group[i];
            const auto* spec = registry.find(call.name);
            const bool gated = spec && spec->direction == toolkit::Direction::Uplink &&
                               spec->requires_confirmation && options.require_confirmation && !safety.estopped();
            if (!gated) {
                launch.push_back(i);
                continue;
            }
            auto validated = registry.validate(*spec, call.args);
            if (std::holds_alternative<toolkit::ToolError>(validated)) {
                launch.push_back(i);  // invoke reports the validation error
                continue;
            }
            slots[i].timing = {start, start, std::chrono::steady_clock::now(), std::chrono::steady_clock::now()};
            if (safety.hold({call.id, call.name, std::get<Json>(validated)})) {
                slots[i].observation = Observation::failure(
                    call, {std::string(kConfirmationRequired),
                           "confirmation required: " + call.name + " " + canonical(std::get<Json>(validated)) +
                               " is held until the operator approves or denies it",
                           {}});
            } else {
                slots[i].observation = Observation::failure(
                    call, {std::string(kConfirmationRequired),
                           "confirmation required: another action is already awaiting the operator", {}});
            }
        }

        if (launch.size() == 1) {
            run_call(group[launch[0]], registry, safety, options, start, slots[launch[0]]);
        } else if (!launch.empty()) {
            std::vector<std::jthread> workers;
            workers.reserve(launch.size());
            for (auto i : launch) {
                workers.emplace_back([&, i] { run_call(group[i], registry, safety, options, start, slots[i]); });
            }
        }  // workers join here: the group barrier

        std::uint64_t end = start;
        for (auto& slot : slots) {
            end = std::max(end, slot.timing.end_tick);
            out.observations.push_back(std::move(*slot.observation));
            out.timings.push_back(slot.timing);
        }
        clock = end;
    }
    return out;
}

}  // namespace rosa::agent
