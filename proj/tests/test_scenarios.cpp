#include "rosa/agent/agent.hpp"
#include "rosa/models/scripted_backend.hpp"
#include "rosa/scenarios/world.hpp"
#include "rosa/toolkit/builtin_tools.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace rosa;
using namespace rosa::scenarios;

namespace {

ScenarioDef load(const std::string& name) {
    return ScenarioDef::load(std::string(ROSA_SOURCE_DIR) + "/scenarios/" + name + ".scenario");
}

// A world plus the safety gate a session would put in front of it.
struct Rig {
    World world;
    std::unique_ptr<agent::SafetyController> safety;

    explicit Rig(ScenarioDef def) : world(build_world(def)) {
        safety = std::make_unique<agent::SafetyController>(*world.graph);
    }
    explicit Rig(const std::string& name) : Rig(load(name)) {}

    toolkit::InvokeResult call(const std::string& tool, const Json& args = Json::object()) {
        toolkit::ToolContext ctx;
        ctx.gate = safety.get();
        ctx.stop = safety->stop_token();
        return world.registry->invoke(tool, args, ctx);
    }
    Json ok(const std::string& tool, const Json& args = Json::object()) {
        auto r = call(tool, args);
        if (!toolkit::ok(r)) {
            FAIL_CHECK(std::get<toolkit::ToolError>(r).text());
            return nullptr;
        }
        return std::get<toolkit::ToolResult>(r).payload;
    }
    std::string error(const std::string& tool, const Json& args = Json::object()) {
        auto r = call(tool, args);
        REQUIRE_FALSE(toolkit::ok(r));
        return std::get<toolkit::ToolError>(r).code;
    }
};

// Hand oracle for Spot's move: forward along the heading, then turn.
Pose2D forward_then_turn(Pose2D p, double d, double turn) {
    const double rad = p.theta * std::numbers::pi / 180.0;
    p.x += d * std::cos(rad);
    p.y += d * std::sin(rad);
    double t = std::fmod(p.theta + turn, 360.0);
    if (t <= -180.0) t += 360.0;
    if (t > 180.0) t -= 360.0;
    p.theta = t;
    return p;
}

void check_pose(const Pose2D& actual, const Pose2D& expected) {
    CHECK(std::abs(actual.x - expected.x) < 1e-9);
    CHECK(std::abs(actual.y - expected.y) < 1e-9);
    CHECK(std::abs(actual.theta - expected.theta) < 1e-9);
}

}  // namespace

TEST_CASE("angle normalization") {
    CHECK(normalize_heading(180) == 180);
    CHECK(normalize_heading(-180) == 180);
    CHECK(normalize_heading(190) == -170);
    CHECK(normalize_heading(-540) == 180);
    CHECK(normalize_yaw(360) == 0);
    CHECK(normalize_yaw(-90) == 270);
    CHECK(normalize_yaw(725) == 5);
}

TEST_CASE("scenario files") {
    SUBCASE("catalog") {
        ScenarioCatalog catalog(ROSA_SOURCE_DIR "/scenarios");
        CHECK(catalog.names() == std::vector<std::string>{"carter", "eels", "ros_demo", "spot"});
        CHECK_THROWS_AS(catalog.get("nope"), UnknownScenario);
        CHECK(catalog.get("eels").heading_error_deg == doctest::Approx(0.3));
        CHECK(catalog.get("carter").obstacle_distance_m == 4.0);
        CHECK_FALSE(catalog.get("spot").rsp.empty());
    }
    SUBCASE("parse errors") {
        CHECK_THROWS_AS(ScenarioDef::parse("name = x\nrobot = spot\n"), ScenarioError);  // no rsp
        CHECK_THROWS_AS(ScenarioDef::parse("name = x\nrobot = tank\nrsp = hi\n"), ScenarioError);
        CHECK_THROWS_AS(ScenarioDef::parse("name = x\nrobot = spot\nrsp = hi\npub = /a\n"), ScenarioError);
        CHECK_THROWS_AS(ScenarioDef::parse("name = x\nrobot = spot\nrsp = hi\nparam = /k {bad\n"), ScenarioError);
        CHECK_THROWS_AS(ScenarioDef::parse("name = x\nrobot = spot\nrsp = hi\nwheels = 4\n"), ScenarioError);
    }
    SUBCASE("overrides") {
        auto def = load("eels");
        def.apply_override("heading_error_deg", 0);
        CHECK(def.heading_error_deg == 0);
        CHECK_THROWS_AS(def.apply_override("robot", "spot"), ScenarioError);
        CHECK_THROWS_AS(def.apply_override("fov_deg", "wide"), ScenarioError);
    }
}

TEST_CASE("ros_demo world") {
    Rig rig("ros_demo");
    auto nodes = rig.ok("rosnode_list");
    CHECK(nodes["nodes"] == Json::array({"/rosout", "/talker", "/listener", "/parameter_server"}));
    CHECK(rig.ok("get_robot_status")["subsystems"] == Json::array({"battery", "cpu"}));
    CHECK(rig.world.registry->sealed());
    CHECK(rig.world.registry->find("set_scratchpad"));
}

TEST_CASE("tool enablement list filters the registry") {
    auto def = ScenarioDef::parse("name = slim\nrobot = spot\nrsp = hi\ntool = stand_up\ntool = rosnode_list\n");
    auto world = build_world(def);
    CHECK(world.registry->find("stand_up"));
    CHECK(world.registry->find("rosnode_list"));
    CHECK(world.registry->find("set_scratchpad"));
    CHECK_FALSE(world.registry->find("move"));
    CHECK_FALSE(world.registry->find("mean"));
    CHECK_THROWS(build_world(ScenarioDef::parse("name = s\nrobot = spot\nrsp = hi\ntool = teleport\n")));
}

TEST_CASE("spot") {
    Rig rig("spot");
    auto& spot = rig.world.robot_as<SpotRobot>();

    SUBCASE("blacklist hides /rosout") {
        auto nodes = rig.ok("rosnode_list")["nodes"];
        CHECK(std::find(nodes.begin(), nodes.end(), "/rosout") == nodes.end());
    }
    SUBCASE("stand_up presses button B") {
        const auto before = rig.world.graph->publish_count("/spot/joy");
        CHECK(rig.ok("stand_up") == "Spot is now standing up.");
        CHECK(spot.state().standing);
        CHECK(rig.world.graph->publish_count("/spot/joy") == before + 1);
        const auto joy = rig.world.graph->topic_buffer("/spot/joy").back();
        CHECK(joy["buttons"][SpotRobot::kButtonB] == 1);
        // Idempotent.
        CHECK(rig.ok("stand_up") == "Spot is now standing up.");
        CHECK(spot.state().standing);
    }
    SUBCASE("stand_up while e-stopped") {
        rig.safety->estop();
        CHECK(rig.error("stand_up") == "EStopped");
        CHECK_FALSE(spot.state().standing);
    }
    SUBCASE("move requires standing") {
        CHECK(rig.error("move", {{"distance_m", 1}, {"turn_deg", 15}}) == "NotStanding");
        check_pose(spot.state().pose, {});
    }
    SUBCASE("move(1, 15) from the origin") {
        rig.ok("stand_up");
        auto text = rig.ok("move", {{"distance_m", 1}, {"turn_deg", 15}}).get<std::string>();
        check_pose(spot.state().pose, forward_then_turn({}, 1, 15));
        CHECK(text.find("Moved forward 1 m and turned 15 degrees") == 0);
        rig.ok("move", {{"distance_m", 0}, {"turn_deg", 0}});
        check_pose(spot.state().pose, forward_then_turn({}, 1, 15));
    }
    SUBCASE("pose algebra") {
        rig.ok("stand_up");
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> dist(0, 3), turn(-180, 180);
        for (int i = 0; i < 50; ++i) {
            Rig a("spot"), b("spot");
            a.ok("stand_up");
            b.ok("stand_up");
            const double heading = turn(rng), d1 = dist(rng), d2 = dist(rng);
            a.ok("move", {{"distance_m", 0}, {"turn_deg", heading}});
            b.ok("move", {{"distance_m", 0}, {"turn_deg", heading}});
            a.ok("move", {{"distance_m", d1}, {"turn_deg", 0}});
            a.ok("move", {{"distance_m", d2}, {"turn_deg", 0}});
            b.ok("move", {{"distance_m", d1 + d2}, {"turn_deg", 0}});
            check_pose(a.world.robot_as<SpotRobot>().state().pose, b.world.robot_as<SpotRobot>().state().pose);
            check_pose(b.world.robot_as<SpotRobot>().state().pose,
                       forward_then_turn(forward_then_turn({}, 0, heading), d1 + d2, 0));
        }
    }
    SUBCASE("camera") {
        CHECK(rig.ok("describe_camera") ==
              "I see an open sandy area with large rocks scattered around. Trees are 20 meters to the left, and "
              "buildings are 25 meters ahead to the right.");
        CHECK_FALSE(spot.state().camera_feed_displayed);
        rig.ok("describe_camera", {{"show_feed", true}});
        CHECK(spot.state().camera_feed_displayed);
    }
    SUBCASE("move is confirmation-gated, stand_up is not") {
        CHECK(rig.world.registry->find("move")->requires_confirmation);
        CHECK_FALSE(rig.world.registry->find("stand_up")->requires_confirmation);
        CHECK(rig.world.registry->find("stand_up")->direction == toolkit::Direction::Uplink);
    }
}

TEST_CASE("eels") {
    SUBCASE("waypoint error model") {
        Rig rig("eels");
        auto& eels = rig.world.robot_as<EelsRobot>();
        auto r = rig.ok("move_to_waypoint", {{"x", 1}, {"y", -0.2}, {"theta", -90}});
        CHECK(std::abs(r["achieved"]["theta"].get<double>() - (-89.7)) < 1e-9);
        CHECK(std::abs(r["heading_error_deg"].get<double>() - 0.3) < 1e-9);
        CHECK(std::abs(eels.state().pose.theta - (-89.7)) < 1e-9);
        CHECK(eels.state().pose.x == 1);
        CHECK(eels.state().pose.y == -0.2);
        // Systematic, not cumulative.
        auto again = rig.ok("move_to_waypoint", {{"x", 1}, {"y", -0.2}, {"theta", -90}});
        CHECK(std::abs(again["achieved"]["theta"].get<double>() - (-89.7)) < 1e-9);
        CHECK(again["status"].get<std::string>().find("retr") != std::string::npos);
    }
    SUBCASE("error constant zero") {
        auto def = load("eels");
        def.apply_override("heading_error_deg", 0);
        Rig rig(def);
        auto r = rig.ok("move_to_waypoint", {{"x", 2}, {"y", 3}, {"theta", 45}});
        CHECK(r["achieved"] == r["requested"]);
    }
    SUBCASE("error model over random waypoints") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> coord(-10, 10), theta(-179, 180), err(-5, 5);
        for (int i = 0; i < 100; ++i) {
            auto def = load("eels");
            const double e = err(rng);
            def.apply_override("heading_error_deg", e);
            Rig rig(def);
            const double t = theta(rng);
            auto r = rig.ok("move_to_waypoint", {{"x", coord(rng)}, {"y", coord(rng)}, {"theta", t}});
            double diff = r["achieved"]["theta"].get<double>() - t;
            diff = std::remainder(diff, 360.0);
            CHECK(std::abs(diff - e) < 1e-9);
        }
    }
    SUBCASE("raise_head calls the service only from the lowered state") {
        Rig rig("eels");
        CHECK(rig.world.graph->service_call_count("/head_raise") == 0);
        CHECK(rig.ok("raise_head") == true);
        CHECK(rig.world.graph->service_call_count("/head_raise") == 1);
        CHECK(rig.world.robot_as<EelsRobot>().state().head_raised);
        CHECK(rig.ok("raise_head") == true);
        CHECK(rig.world.graph->service_call_count("/head_raise") == 1);
    }
    SUBCASE("raise_head while e-stopped") {
        Rig rig("eels");
        rig.safety->estop();
        CHECK(rig.error("raise_head") == "EStopped");
        CHECK(rig.world.graph->service_call_count("/head_raise") == 0);
    }
    SUBCASE("camera") {
        Rig rig("eels");
        CHECK(rig.ok("describe_camera").get<std::string>().find("I see a laboratory environment with vaulted ceilings") == 0);
    }
}

TEST_CASE("carter") {
    SUBCASE("lidar and forward motion") {
        Rig rig("carter");
        auto& carter = rig.world.robot_as<CarterRobot>();
        CHECK(rig.ok("lidar_scan")["obstacle_distance_m"] == 4.0);
        CHECK(rig.error("move_forward", {{"distance_m", 5.0}}) == "ObstacleViolation");
        check_pose(carter.state().pose, {});
        rig.ok("move_forward", {{"distance_m", 0}});
        check_pose(carter.state().pose, {});
        CHECK(rig.ok("move_forward", {{"distance_m", 4.0}}) == "Moved forward 4 meters.");
        CHECK(std::abs(carter.state().pose.x - 4.0) < 1e-9);
        CHECK(rig.ok("lidar_scan")["obstacle_distance_m"] == 0.0);
        CHECK(rig.error("move_forward", {{"distance_m", -1}}) == "BadArgument");
    }
    SUBCASE("clearance never goes negative") {
        std::mt19937 rng(8);
        std::uniform_real_distribution<double> step(0, 2.5);
        for (int i = 0; i < 40; ++i) {
            Rig rig("carter");
            double progress = 0;
            for (int k = 0; k < 6; ++k) {
                const double d = step(rng);
                auto r = rig.call("move_forward", {{"distance_m", d}});
                if (toolkit::ok(r)) {
                    progress += d;
                }
                const double c = rig.ok("lidar_scan")["obstacle_distance_m"].get<double>();
                CHECK(c >= 0);
                CHECK(std::abs(c - std::max(0.0, 4.0 - progress)) < 1e-9);
            }
        }
    }
    SUBCASE("rotate_camera publishes radians") {
        Rig rig("carter");
        auto& carter = rig.world.robot_as<CarterRobot>();
        CHECK(rig.ok("rotate_camera", {{"angle", 90}}) == "Camera rotated by 90 degrees.");
        const auto msg = rig.world.graph->topic_buffer("/carter/camera_rotate").back();
        CHECK(std::abs(msg["angle_rad"].get<double>() - std::numbers::pi / 2) < 1e-12);
        CHECK(carter.state().camera_yaw == 90);
        rig.ok("rotate_camera", {{"angle", 360}});
        CHECK(carter.state().camera_yaw == 90);
        for (int i = 0; i < 4; ++i) {
            rig.ok("rotate_camera", {{"angle", 90}});
        }
        CHECK(carter.state().camera_yaw == 90);
    }
    SUBCASE("capture_snapshot records yaw and tick") {
        Rig rig("carter");
        auto snap = rig.ok("capture_snapshot");
        CHECK(snap["yaw"] == 0.0);
        CHECK(snap["tick"].get<graphsim::Tick>() <= rig.world.graph->now());
        REQUIRE(rig.world.robot_as<CarterRobot>().state().snapshots.size() == 1);
    }
}

namespace {

struct ScriptedSession {
    World world;
    models::ScriptedBackend backend;
    std::unique_ptr<agent::Agent> agent;

    explicit ScriptedSession(const ScenarioDef& def, agent::AgentConfig config = {})
        : world(build_world(def)), backend(models::Script::load(*def.script)) {
        agent = std::make_unique<agent::Agent>(config, def.rsp, world.registry, backend, *world.graph,
                                               world.scratchpad);
    }
};

std::size_t count_calls(const agent::TurnResult& r, const std::string& tool) {
    std::size_t n = 0;
    for (const auto& s : r.steps) {
        for (const auto& a : s.actions) {
            n += a.name == tool;
        }
    }
    return n;
}

}  // namespace

TEST_CASE("carter panorama law") {
    std::mt19937 rng(360);
    std::uniform_real_distribution<double> fov_dist(1.0, 360.0);
    std::vector<double> fovs{90, 120, 100, 360, 1, 45, 7.5};
    for (int i = 0; i < 25; ++i) {
        fovs.push_back(std::round(fov_dist(rng) * 100) / 100);
    }
    for (double f : fovs) {
        CAPTURE(f);
        agent::AgentConfig config;
        config.context_budget = 1'000'000;
        ScriptedSession s(load("carter"), config);
        auto ask = s.agent->run_turn("Give me a 360 degree view of your surroundings.");
        CHECK(ask.final_answer.find("How many snapshots") != std::string::npos);
        auto r = s.agent->run_turn("Assume the camera FoV is " + models::format_number(f) + " degrees.");

        // Independent oracle: ceil(360 / f).
        const auto expected = static_cast<std::size_t>(std::ceil(360.0 / f - 1e-12));
        const auto state = s.world.robot_as<CarterRobot>().state();
        REQUIRE(state.snapshots.size() == expected);
        CHECK(count_calls(r, "capture_snapshot") == expected);
        CHECK(count_calls(r, "rotate_camera") == expected);
        CHECK(r.final_answer.find("captured " + std::to_string(expected) + " snapshots") != std::string::npos);

        std::vector<double> yaws;
        for (const auto& snap : state.snapshots) {
            yaws.push_back(snap.yaw);
            CHECK(snap.yaw >= 0);
            CHECK(snap.yaw < 360);
        }
        std::sort(yaws.begin(), yaws.end());
        CHECK(yaws.front() == 0);
        for (std::size_t k = 1; k < yaws.size(); ++k) {
            CHECK(yaws[k] - yaws[k - 1] <= f + 1e-9);
        }
        CHECK(360.0 - yaws.back() <= f + 1e-9);
        if (f == 90) {
            CHECK(yaws == std::vector<double>{0, 90, 180, 270});
        }
    }
}

TEST_CASE("confirmation coverage over randomized scripted sessions") {
    // Motion requests per scenario; without an approval none may move the robot.
    const std::map<std::string, std::vector<std::string>> prompts{
        {"spot",
         {"Stand up", "Walk forward about a meter and turn 15 degrees to the left.", "walk forward 2 meters",
          "What do you see?", "Show me the camera feed."}},
        {"eels",
         {"Move to the waypoint at (1, -0.2) with a -90 heading.", "Move toward the rock in the corner.",
          "Go ahead and raise your head.", "What do you see?"}},
        {"carter",
         {"Move forward as far as you can.", "Yes.", "drive forward 3 meters", "Give me a 360 degree view of your surroundings.",
          "Assume the camera FoV is 120 degrees."}},
    };
    std::mt19937 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const auto& [name, pool] = *std::next(prompts.begin(), trial % 3);
        ScriptedSession s(load(name));
        auto pose = [&] { return s.world.robot->state_json().at("pose"); };
        const auto start = pose();
        for (int k = 0; k < 6; ++k) {
            if (s.agent->safety().pending() && rng() % 2) {
                s.agent->confirm_action(agent::Decision::Deny);
            } else {
                s.agent->run_turn(pool[rng() % pool.size()]);
            }
            CHECK(pose() == start);
        }
    }
}

TEST_CASE("scripted transcripts") {
    SUBCASE("eels rock request uses no tools") {
        ScriptedSession s(load("eels"));
        auto r = s.agent->run_turn("Move toward the rock in the corner.");
        CHECK(r.steps.empty());
        CHECK(r.final_answer.find("(x, y, θ)") != std::string::npos);
    }
    SUBCASE("carter as far as possible moves exactly the scanned distance") {
        ScriptedSession s(load("carter"));
        s.agent->run_turn("Move forward as far as you can.");
        auto scan = s.agent->run_turn("Yes.");
        CHECK(scan.final_answer.find("4 meters ahead") != std::string::npos);
        auto held = s.agent->run_turn("Yes.");
        REQUIRE(held.pending);
        CHECK(held.pending->args == Json{{"distance_m", 4.0}});
        auto moved = s.agent->confirm_action(agent::Decision::Approve);
        CHECK(moved.final_answer == "Ok, I have moved forward by 4 meters.");
        CHECK(std::abs(s.world.robot_as<CarterRobot>().state().pose.x - 4.0) < 1e-9);
    }
}
