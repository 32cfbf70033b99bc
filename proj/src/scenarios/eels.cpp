#include "motion.hpp"

#include "rosa/models/script.hpp"

namespace rosa::scenarios {

using models::format_number;

EelsRobot::EelsRobot(double heading_error_deg, std::string camera_description)
    : description_(std::move(camera_description)) {
    state_.heading_error_deg = heading_error_deg;
}

EelsState EelsRobot::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

Json EelsRobot::state_json() const {
    const auto s = state();
    return {{"pose", detail::pose_json(s.pose)}, {"head_raised", s.head_raised},
            {"heading_error_deg", s.heading_error_deg}};
}

void EelsRobot::bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) {
    const auto rosa = graph.register_node("/rosa", {{"/eels/cmd_waypoint", "rosa_msgs/Waypoint"}});
    graph.register_node("/eels/driver", {},
                        {{"/eels/cmd_waypoint",
                          [this](const Json& msg) {
                              std::lock_guard lock(mutex_);
                              // The systematic heading error applies to every move.
                              state_.pose = {msg.at("x").get<double>(), msg.at("y").get<double>(),
                                             normalize_heading(msg.at("theta").get<double>() +
                                                               state_.heading_error_deg)};
                          },
                          "rosa_msgs/Waypoint"}},
                        {{"/head_raise", {}, [this](const Json&) {
                              std::lock_guard lock(mutex_);
                              state_.head_raised = true;
                              return Json::object();
                          }}});

    toolkit::ToolSpec waypoint;
    waypoint.name = "move_to_waypoint";
    waypoint.description = "Drive to a waypoint given as x and y in meters and a heading theta in degrees.";
    waypoint.params = {{"x", ValueType::Number, true, std::nullopt, "Target x in meters."},
                       {"y", ValueType::Number, true, std::nullopt, "Target y in meters."},
                       {"theta", ValueType::Number, true, std::nullopt, "Target heading in degrees."}};
    waypoint.direction = toolkit::Direction::Uplink;
    waypoint.requires_confirmation = true;
    registry.register_tool(waypoint, [this, &graph, rosa](const Json& args, toolkit::ToolContext& ctx) {
        const double x = args.at("x").get<double>();
        const double y = args.at("y").get<double>();
        const double theta = normalize_heading(args.at("theta").get<double>());
        ctx.actuate([&] { graph.publish(rosa, "/eels/cmd_waypoint", Json{{"x", x}, {"y", y}, {"theta", theta}}); });
        const auto achieved = state().pose;
        const double error = normalize_heading(achieved.theta - theta);
        return Json{{"requested", detail::pose_json({x, y, theta})},
                    {"achieved", detail::pose_json(achieved)},
                    {"heading_error_deg", error},
                    {"status", "Reached (" + format_number(x) + ", " + format_number(y) + ") with heading " +
                                   format_number(achieved.theta) + " degrees; requested " + format_number(theta) +
                                   ". The move can be retried to correct the heading."}};
    });

    toolkit::ToolSpec head;
    head.name = "raise_head";
    head.description = "Raise the head module.";
    head.direction = toolkit::Direction::Uplink;
    registry.register_tool(head, [this, &graph](const Json&, toolkit::ToolContext& ctx) {
        if (state().head_raised) {
            return Json(true);
        }
        ctx.actuate([&] { graph.call_service("/head_raise", Json::object()); });
        return Json(true);
    });

    toolkit::ToolSpec camera;
    camera.name = "describe_camera";
    camera.description = "Describe what the robot camera sees.";
    registry.register_tool(camera, [this](const Json&, toolkit::ToolContext&) { return Json(description_); });
}

}  // namespace rosa::scenarios
