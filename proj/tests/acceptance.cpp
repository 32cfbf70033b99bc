// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Each criterion collects its own failure messages so a FAIL line says why.

#include "rosa/agent/agent.hpp"
#include "rosa/gateway/session_service.hpp"
#include "rosa/scenarios/world.hpp"
#include "rosa/toolkit/builtin_tools.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

using namespace rosa;
using namespace std::chrono_literals;
using graphsim::Tick;

namespace {

struct Check {
    std::vector<std::string> failures;

    void expect(bool condition, const std::string& what) {
        if (!condition) failures.push_back(what);
    }
};

gateway::SessionService make_service() {
    return gateway::SessionService(scenarios::ScenarioCatalog(ROSA_SOURCE_DIR "/scenarios"), {});
}

std::vector<Json> records_of(const std::string& transcript, const std::string& kind) {
    std::vector<Json> out;
    std::istringstream in(transcript);
    std::string line;
    while (std::getline(in, line)) {
        auto j = Json::parse(line);
        if (j["kind"] == kind) out.push_back(j["body"]);
    }
    return out;
}

std::string error_code(const toolkit::InvokeResult& r) {
    if (const auto* e = std::get_if<toolkit::ToolError>(&r)) return e->code;
    return "ok";
}

class FnBackend : public models::ModelBackend {
public:
    explicit FnBackend(std::function<std::string()> fn) : fn_(std::move(fn)) {}
    models::ModelResponse complete(const models::ModelRequest&) override {
        std::lock_guard lock(mutex_);
        ++requests;
        return {fn_()};
    }
    models::ModelCapabilities capabilities() const override { return {true, 128000}; }
    int requests = 0;

private:
    std::mutex mutex_;
    std::function<std::string()> fn_;
};

toolkit::ToolSpec spec(const std::string& name, toolkit::Direction dir) {
    toolkit::ToolSpec s;
    s.name = name;
    s.description = "acceptance tool " + name;
    s.direction = dir;
    return s;
}

// 1: the node-listing exchange.
void node_listing(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    auto service = make_service();
    const auto id = service.create_session("ros_demo");
    const auto events = service.post_message(id, "Provide me with a list of ROS nodes.");
    const auto elapsed = std::chrono::steady_clock::now() - start;

    std::vector<std::string> kinds;
    for (const auto& e : events) kinds.push_back(e["kind"]);
    c.expect(kinds == std::vector<std::string>{"reasoning", "action", "observation", "final"}, "event sequence");
    c.expect(events.size() == 4 && events[1]["tool"] == "rosnode_list", "action is rosnode_list");

    const auto steps = records_of(service.export_transcript(id), "step");
    c.expect(steps.size() == 1, "exactly one step trace");
    if (steps.size() == 1) {
        c.expect(steps[0]["actions"].size() == 1 && steps[0]["observations"].size() == 1, "one action, one observation");
    }

    const auto answer = events.back()["text"].get<std::string>();
    std::set<std::string> named;
    const std::regex node_name("/[A-Za-z0-9_]+(/[A-Za-z0-9_]+)*");
    for (std::sregex_iterator it(answer.begin(), answer.end(), node_name), end; it != end; ++it) {
        named.insert(it->str());
    }
    c.expect(named == std::set<std::string>{"/rosout", "/talker", "/listener", "/parameter_server"},
             "answer names exactly the four nodes");
    c.expect(elapsed < 1s, "runtime under 1 s");
}

// 2: canonical node_list payload.
void node_list_payload(Check& c) {
    graphsim::Graph g;
    g.register_node("/talker");
    g.register_node("/listener");
    const auto text = canonical(toolkit::node_list(g));
    c.expect(text == R"({"namespace":"/","nodes":["/talker","/listener"],"pattern":".*","total":2})",
             "got " + text);
}

// 3: status report with a parallel second iteration.
void status_report(Check& c) {
    auto service = make_service();
    const auto id = service.create_session(
        "ros_demo", {{"agent.delay_ticks.get_battery_status", 50}, {"agent.delay_ticks.get_cpu_status", 50}});
    const auto events = service.post_message(id, "Give me a status report.");
    const auto steps = records_of(service.export_transcript(id), "step");
    c.expect(steps.size() == 2, "two tool iterations then the answer");
    c.expect(events.back()["kind"] == "final" && events.back()["status"] == "completed", "third iteration answers");
    if (steps.size() != 2) return;

    const auto& first = steps[0]["actions"];
    c.expect(first.size() == 1 && first[0]["name"] == "get_robot_status", "iteration 1 is get_robot_status alone");

    const auto& second = steps[1]["actions"];
    std::set<std::string> names;
    for (const auto& a : second) names.insert(a["name"]);
    c.expect(second.size() == 2 && names == std::set<std::string>{"get_battery_status", "get_cpu_status"},
             "iteration 2 is battery and cpu");
    c.expect(second.size() == 2 && second[0]["group"] == second[1]["group"], "one parallel group");
    const auto& t = steps[1]["timings"];
    if (t.size() == 2) {
        const auto s0 = t[0]["start_tick"].get<std::uint64_t>(), e0 = t[0]["end_tick"].get<std::uint64_t>();
        const auto s1 = t[1]["start_tick"].get<std::uint64_t>(), e1 = t[1]["end_tick"].get<std::uint64_t>();
        c.expect(s0 < e1 && s1 < e0, "execution intervals overlap");
        c.expect(e0 - s0 >= 50 && e1 - s1 >= 50, "injected delays applied");
    } else {
        c.expect(false, "timings recorded");
    }
}

// 4: panorama snapshot counts.
void panorama(Check& c) {
    for (const auto& [fov, expected] : std::vector<std::pair<int, std::size_t>>{{90, 4}, {120, 3}, {100, 4}}) {
        auto service = make_service();
        const auto id = service.create_session("carter");
        service.post_message(id, "Give me a 360 degree view of your surroundings.");
        const auto events = service.post_message(id, "Assume the camera FoV is " + std::to_string(fov) + " degrees.");
        std::size_t rotates = 0, captures = 0;
        for (const auto& e : events) {
            if (e["kind"] != "action") continue;
            if (e["tool"] == "rotate_camera") {
                ++rotates;
                c.expect(e["args"]["angle"] == fov, "rotate_camera by the FoV");
            }
            captures += e["tool"] == "capture_snapshot";
        }
        const auto& snaps = service.world(id).robot_as<scenarios::CarterRobot>().state().snapshots;
        const auto tag = "fov " + std::to_string(fov);
        c.expect(rotates == expected && captures == expected, tag + ": rotate/capture pairs");
        c.expect(snaps.size() == expected, tag + ": snapshots stored");
        if (fov == 90) {
            std::vector<double> yaws;
            for (const auto& s : snaps) yaws.push_back(s.yaw);
            std::sort(yaws.begin(), yaws.end());
            c.expect(yaws == std::vector<double>{0, 90, 180, 270}, "fov 90: yaws");
        }
    }
}

// 5: lidar-bounded forward motion.
void carter_obstacle(Check& c) {
    {
        auto service = make_service();
        const auto id = service.create_session("carter");
        service.post_message(id, "Move forward as far as you can.");
        service.post_message(id, "Yes.");
        const auto held = service.post_message(id, "Yes.");
        const auto& pending = held.back()["pending_confirmation"];
        c.expect(!pending.is_null() && pending["tool"] == "move_forward", "plan holds a move_forward");
        if (!pending.is_null()) {
            c.expect(std::abs(pending["args"]["distance_m"].get<double>() - 4.0) < 1e-9, "planned distance 4.0");
            service.confirm(id, agent::Decision::Approve);
        }
        const auto& obs = service.world(id).robot_as<scenarios::CarterRobot>().state().pose;
        c.expect(std::abs(obs.x - 4.0) < 1e-9 && std::abs(obs.y) < 1e-9, "moved exactly 4.0 m");
    }
    {
        auto world = scenarios::build_world(scenarios::ScenarioDef::load(ROSA_SOURCE_DIR "/scenarios/carter.scenario"));
        agent::SafetyController safety(*world.graph);
        toolkit::ToolContext ctx;
        ctx.gate = &safety;
        auto scan = world.registry->invoke("lidar_scan", Json::object(), ctx);
        c.expect(toolkit::ok(scan) && std::get<toolkit::ToolResult>(scan).payload["obstacle_distance_m"] == 4.0,
                 "lidar_scan returns 4.0");
        const auto before = world.robot_as<scenarios::CarterRobot>().state().pose;
        auto r = world.registry->invoke("move_forward", {{"distance_m", 5.0}}, ctx);
        c.expect(error_code(r) == "ObstacleViolation", "move_forward(5.0) is an ObstacleViolation");
        c.expect(world.robot_as<scenarios::CarterRobot>().state().pose == before, "no pose change");
    }
}

// 6: move approval.
void spot_confirmation(Check& c) {
    auto service = make_service();
    const auto id = service.create_session("spot");
    service.post_message(id, "Stand up");
    auto& spot = service.world(id).robot_as<scenarios::SpotRobot>();
    const auto before = spot.state_json();
    const auto publishes = service.world(id).graph->publish_count("/spot/cmd_move");

    const auto held = service.post_message(id, "Walk forward about a meter and turn 15 degrees to the left.");
    const auto& pending = held.back()["pending_confirmation"];
    c.expect(!pending.is_null() && pending["tool"] == "move" &&
                 pending["args"] == Json{{"distance_m", 1}, {"turn_deg", 15}},
             "confirmation request for move(1, 15)");
    c.expect(spot.state_json() == before, "no state change before approval");
    c.expect(service.world(id).graph->publish_count("/spot/cmd_move") == publishes, "nothing published");

    service.confirm(id, agent::Decision::Approve);
    const auto p = spot.state().pose;
    c.expect(std::abs(p.x - 1) < 1e-9 && std::abs(p.y) < 1e-9 && std::abs(p.theta - 15) < 1e-9,
             "pose (1, 0, 15)");
    const auto transcript = service.export_transcript(id);
    c.expect(records_of(transcript, "safety").size() == 1, "one confirmation record in the transcript");
    c.expect(service.metrics(id).interventions == 1, "intervention count 1");
}

// 7: EELS heading error, head service, rock request.
void eels(Check& c) {
    auto service = make_service();
    const auto id = service.create_session("eels");
    auto world_registry = service.world(id).registry;
    auto& graph = *service.world(id).graph;
    agent::SafetyController safety(graph);
    toolkit::ToolContext ctx;
    ctx.gate = &safety;

    auto r = world_registry->invoke("move_to_waypoint", {{"x", 1}, {"y", -0.2}, {"theta", -90}}, ctx);
    if (toolkit::ok(r)) {
        const auto& p = std::get<toolkit::ToolResult>(r).payload;
        c.expect(std::abs(p["achieved"]["theta"].get<double>() + 89.7) < 1e-9, "achieved theta -89.7");
        c.expect(std::abs(p["heading_error_deg"].get<double>() - 0.3) < 1e-9, "heading error 0.3");
    } else {
        c.expect(false, "move_to_waypoint failed: " + error_code(r));
    }

    world_registry->invoke("raise_head", Json::object(), ctx);
    c.expect(graph.service_call_count("/head_raise") == 1, "raise_head from lowered calls once");
    world_registry->invoke("raise_head", Json::object(), ctx);
    c.expect(graph.service_call_count("/head_raise") == 1, "raise_head when raised calls zero times");

    const auto events = service.post_message(id, "Move toward the rock in the corner.");
    const bool no_tools = std::none_of(events.begin(), events.end(), [](const Json& e) { return e["kind"] == "action"; });
    c.expect(no_tools, "rock request invokes no tools");
    c.expect(events.back()["text"].get<std::string>().find("(x, y, θ)") != std::string::npos,
             "answer suggests an (x, y, θ) waypoint");
}

// 8: context assembly under randomized budgets.
void eviction(Check& c) {
    using agent::Message;
    using agent::Role;
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> len(0, 200), count(0, 40);
    const auto tokens = [](const std::string& s) { return (s.size() + 3) / 4; };  // independent estimate
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Message> rsp{{Role::System, std::string(len(rng) + 1, 'r'), 0}};
        const std::string catalog(len(rng) + 1, 'c');
        const std::string pad(trial % 3 ? len(rng) : 0, 'p');
        std::vector<Message> history;
        const int sys = count(rng) % 3;
        for (int i = 0; i < sys; ++i) history.push_back({Role::System, std::string(len(rng) + 1, 'S'), 0});
        std::vector<std::size_t> convo;
        for (int i = 0, n = count(rng); i < n; ++i) {
            const Role role = i % 2 ? Role::Assistant : Role::User;
            history.push_back({role, "m" + std::to_string(i) + std::string(len(rng), 'h'), static_cast<Tick>(i)});
            convo.push_back(tokens(history.back().content));
        }
        std::size_t fixed = tokens(rsp[0].content) + tokens(catalog);
        if (!pad.empty()) fixed += tokens(agent::scratchpad_message(pad)->content);
        for (int i = 0; i < sys; ++i) fixed += tokens(history[static_cast<std::size_t>(i)].content);
        const std::size_t budget = fixed + std::uniform_int_distribution<std::size_t>(0, 1500)(rng);

        const auto doc = agent::assemble_context(rsp, catalog, pad, history, budget);
        // Oracle: keep the longest suffix of the conversation that fits.
        std::size_t keep = 0, used = 0;
        while (keep < convo.size() && used + convo[convo.size() - 1 - keep] <= budget - fixed) {
            used += convo[convo.size() - 1 - keep];
            ++keep;
        }
        std::vector<Message> expected(history.begin(), history.begin() + sys);
        expected.insert(expected.end(), history.end() - static_cast<long>(keep), history.end());
        const auto off = doc.offsets();
        const bool good = doc.token_estimate() <= budget && off.rsp < off.catalog && off.catalog < off.scratchpad &&
                          off.scratchpad < off.history && doc.history == expected;
        bad += !good;
    }
    c.expect(bad == 0, std::to_string(bad) + " of 1000 trials violated a property");
    c.expect(std::chrono::steady_clock::now() - start < 10s, "suite under 10 s");
}

// 9: global and per-call blacklists compose as a union.
void blacklist_union(Check& c) {
    std::mt19937 rng(9);
    const std::vector<std::string> pool{"/rosout", "/talker", "/listener", "/cam", "/cam_left", "/diag_a", "/diag_b"};
    auto pick = [&](std::size_t max) {
        std::vector<std::string> out;
        for (std::size_t i = 0, n = rng() % (max + 1); i < n; ++i) {
            auto name = pool[rng() % pool.size()];
            if (rng() % 4 == 0) name = name.substr(0, 1 + rng() % (name.size() - 1)) + "*";
            out.push_back(name);
        }
        return out;
    };
    int bad = 0;
    for (int trial = 0; trial < 500; ++trial) {
        graphsim::Graph g;
        std::vector<std::string> present;
        for (const auto& n : pool) {
            if (rng() % 2) {
                g.register_node(n);
                present.push_back(n);
            }
        }
        toolkit::ToolRegistry base;
        toolkit::register_ros_tools(base, g);
        const auto global = pick(3), local = pick(3);
        const auto injected = toolkit::inject_blacklist(base, toolkit::Blacklist(global));
        auto both = global;
        both.insert(both.end(), local.begin(), local.end());
        const auto lhs = injected.invoke("rosnode_list", Json{{"blacklist", local}});
        const auto rhs = base.invoke("rosnode_list", Json{{"blacklist", both}});

        // Hand oracle: exact names or '*' prefixes, case-sensitive.
        std::vector<std::string> visible;
        for (const auto& n : present) {
            const bool hidden = std::any_of(both.begin(), both.end(), [&](const std::string& b) {
                return !b.empty() && b.back() == '*' ? n.rfind(b.substr(0, b.size() - 1), 0) == 0 : n == b;
            });
            if (!hidden) visible.push_back(n);
        }
        const bool good = toolkit::ok(lhs) && toolkit::ok(rhs) &&
                          std::get<toolkit::ToolResult>(lhs).payload == std::get<toolkit::ToolResult>(rhs).payload &&
                          std::get<toolkit::ToolResult>(lhs).payload["nodes"] == Json(visible);
        bad += !good;
    }
    c.expect(bad == 0, std::to_string(bad) + " of 500 trials differ");

    graphsim::Graph g;
    for (const char* n : {"/rosout", "/talker", "/listener"}) g.register_node(n);
    toolkit::ToolRegistry base;
    toolkit::register_ros_tools(base, g);
    const auto reg = toolkit::inject_blacklist(base, toolkit::Blacklist({"/rosout"}));
    const auto out = reg.invoke("rosnode_list", Json{{"blacklist", {"/talker"}}});
    c.expect(toolkit::ok(out) && std::get<toolkit::ToolResult>(out).payload["nodes"] == Json{"/listener"},
             "global /rosout plus agent /talker leaves /listener");
}

// 10: iteration limit and e-stop dominance.
void limits_and_estop(Check& c) {
    {
        graphsim::Graph g;
        toolkit::ToolRegistry r;
        r.register_tool(spec("read_sensor", toolkit::Direction::Downlink),
                        [](const Json&, toolkit::ToolContext&) { return Json(1); });
        r.seal();
        auto registry = std::make_shared<const toolkit::ToolRegistry>(std::move(r));
        int n = 0;
        FnBackend backend([&] {
            return canonical(Json{{"tool_calls", {{{"id", "r" + std::to_string(++n)}, {"group", 0},
                                                   {"name", "read_sensor"}, {"args", Json::object()}}}}});
        });
        agent::AgentConfig config;
        config.max_iterations = 5;
        agent::Agent a(config, {"rsp"}, registry, backend, g);
        const auto result = a.run_turn("loop");
        c.expect(result.status == agent::TurnStatus::IterationLimit && result.steps.size() == 5,
                 "stops after exactly max_iterations traces");
        c.expect(result.final_answer.find("iteration limit") != std::string::npos, "limit diagnostic");
    }

    std::mt19937 rng(10);
    int late = 0, some_effects = 0, cut_short = 0;
    for (int trial = 0; trial < 100; ++trial) {
        graphsim::Graph g;
        auto node = g.register_node("/mover", {{"/effects", "std_msgs/Int"}});
        std::mutex mutex;
        std::vector<Tick> effects;
        toolkit::ToolRegistry r;
        r.register_tool(spec("push", toolkit::Direction::Uplink), [&](const Json&, toolkit::ToolContext& ctx) {
            for (int i = 0; i < 20; ++i) {
                ctx.actuate([&] {
                    const auto t = g.publish(node, "/effects", i);
                    std::lock_guard lock(mutex);
                    effects.push_back(t);
                });
                ctx.delay(1);
            }
            return Json("pushed");
        });
        r.seal();
        auto registry = std::make_shared<const toolkit::ToolRegistry>(std::move(r));
        Json batch = Json::array();
        for (int i = 0, k = 1 + static_cast<int>(rng() % 4); i < k; ++i) {
            batch.push_back({{"id", "p" + std::to_string(i)}, {"group", static_cast<int>(rng() % 2)}, {"name", "push"},
                             {"args", Json::object()}});
        }
        std::deque<std::string> replies{canonical(Json{{"tool_calls", batch}}), "done"};
        FnBackend backend([&] {
            auto s = replies.empty() ? std::string("done") : replies.front();
            if (!replies.empty()) replies.pop_front();
            return s;
        });
        agent::AgentConfig config;
        config.require_confirmation_for_uplink = false;
        config.tick_duration = 50us;
        agent::Agent a(config, {"rsp"}, registry, backend, g);
        const auto wait = std::chrono::microseconds(rng() % 1500);
        Tick ack = 0;
        std::jthread stopper([&] {
            std::this_thread::sleep_for(wait);
            ack = a.estop();
        });
        a.run_turn("push");
        stopper.join();
        std::lock_guard lock(mutex);
        late += std::count_if(effects.begin(), effects.end(), [&](Tick t) { return t >= ack; });
        some_effects += !effects.empty();
        cut_short += effects.size() < 20 * batch.size();
    }
    // Both sides of the race must actually occur for the property to mean anything.
    c.expect(some_effects > 0 && cut_short > 0, "interleavings cover effects before and after the stop");
    c.expect(late == 0, std::to_string(late) + " uplink effects landed at or after the acknowledgement");
}

// 11: capability floor.
void model_validation(Check& c) {
    c.expect(models::validate_model({true, 8191}).has_value(), "(true, 8191) rejected");
    c.expect(models::validate_model({false, std::numeric_limits<std::size_t>::max()}).has_value(),
             "(false, unbounded) rejected");
    c.expect(!models::validate_model({true, 8192}).has_value(), "(true, 8192) accepted");
}

// 12: calculation tools against 50-digit decimals.
void calculation(Check& c) {
    using Big = boost::multiprecision::cpp_dec_float_50;
    c.expect(toolkit::add_all({1, 2, 3}) == 6.0, "add_all([1,2,3]) = 6");
    const auto m = toolkit::mean({2, 4});
    const Big x[] = {2, 4};
    const Big mu = (x[0] + x[1]) / 2;
    const Big sd = boost::multiprecision::sqrt(((x[0] - mu) * (x[0] - mu) + (x[1] - mu) * (x[1] - mu)) / 1);
    c.expect(abs(Big(m.mean) - mu) < Big("1e-9"), "mean 3");
    c.expect(abs(Big(m.stdev) - sd) < Big("1e-9"), "stdev sqrt(2)");

    toolkit::ToolRegistry r;
    toolkit::register_calculation_tools(r);
    auto via_tool = r.invoke("mean", Json{{"numbers", {2, 4}}});
    c.expect(toolkit::ok(via_tool) && std::get<toolkit::ToolResult>(via_tool).payload["mean"] == 3.0,
             "mean tool returns 3");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, void (*)(Check&)>> criteria{
        {"node listing golden trace", node_listing},
        {"canonical node_list payload", node_list_payload},
        {"status report with parallel group", status_report},
        {"carter panorama counts", panorama},
        {"carter obstacle", carter_obstacle},
        {"spot move confirmation", spot_confirmation},
        {"eels waypoint, head and rock", eels},
        {"context eviction properties", eviction},
        {"blacklist union property", blacklist_union},
        {"iteration limit and e-stop dominance", limits_and_estop},
        {"model validation", model_validation},
        {"calculation tools", calculation},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        std::cout << (c.failures.empty() ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first;
        for (const auto& f : c.failures) std::cout << " | " << f;
        std::cout << '\n';
        failed += !c.failures.empty();
    }
    return failed == 0 ? 0 : 1;
}
