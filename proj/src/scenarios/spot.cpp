#include "motion.hpp"

#include "rosa/models/script.hpp"

namespace rosa::scenarios {

using detail::radians;
using models::format_number;

SpotState SpotRobot::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

Json SpotRobot::state_json() const {
    const auto s = state();
    return {{"standing", s.standing}, {"pose", detail::pose_json(s.pose)},
            {"camera_feed_displayed", s.camera_feed_displayed}};
}

void SpotRobot::bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) {
    const auto rosa = graph.register_node("/rosa",
                                          {{"/spot/joy", "sensor_msgs/Joy"},
                                           {"/spot/cmd_move", "rosa_msgs/SpotMove"},
                                           {"/spot/camera/display", "std_msgs/Bool"}});

    graph.register_node(
        "/spot/teleop", {},
        {{"/spot/joy",
          [this](const Json& msg) {
              const auto& buttons = msg.at("buttons");
              if (buttons.size() > kButtonB && buttons[kButtonB] == 1) {
                  std::lock_guard lock(mutex_);
                  state_.standing = true;
              }
          },
          "sensor_msgs/Joy"},
         {"/spot/cmd_move", [this](const Json& msg) {
              std::lock_guard lock(mutex_);
              auto& p = state_.pose;
              if (msg.contains("forward_m")) {
                  const double d = msg["forward_m"].get<double>();
                  p.x += d * std::cos(radians(p.theta));
                  p.y += d * std::sin(radians(p.theta));
              }
              if (msg.contains("turn_deg")) {
                  p.theta = normalize_heading(p.theta + msg["turn_deg"].get<double>());
              }
          },
          "rosa_msgs/SpotMove"}});
    graph.register_node("/spot/rqt_camera", {}, {{"/spot/camera/display", [this](const Json& msg) {
                                                      std::lock_guard lock(mutex_);
                                                      state_.camera_feed_displayed = msg.value("data", false);
                                                  },
                                                  "std_msgs/Bool"}});

    toolkit::ToolSpec stand;
    stand.name = "stand_up";
    stand.description = "Command the robot to stand.";
    stand.direction = toolkit::Direction::Uplink;
    registry.register_tool(stand, [this, &graph, rosa](const Json&, toolkit::ToolContext& ctx) {
        // A joystick message with button B pressed, as the teleop stack expects.
        Json joy = {{"axes", Json::array()}, {"buttons", Json::array()}};
        for (int i = 0; i < 8; ++i) {
            joy["axes"].push_back(0.0);
        }
        for (int i = 0; i < 11; ++i) {
            joy["buttons"].push_back(0);
        }
        joy["buttons"][kButtonB] = 1;
        ctx.actuate([&] { graph.publish(rosa, "/spot/joy", joy); });
        if (!state().standing) {
            throw toolkit::ToolFailure("StandFailed", "the teleop driver did not report standing");
        }
        return Json("Spot is now standing up.");
    });

    toolkit::ToolSpec move;
    move.name = "move";
    move.description = "Walk forward a distance, then turn in place. Positive turns are to the left.";
    move.params = {{"distance_m", ValueType::Number, true, std::nullopt, "Distance to walk forward in meters."},
                   {"turn_deg", ValueType::Number, false, Json(0), "Angle to turn afterwards in degrees."}};
    move.direction = toolkit::Direction::Uplink;
    move.requires_confirmation = true;
    registry.register_tool(move, [this, &graph, rosa](const Json& args, toolkit::ToolContext& ctx) {
        if (!state().standing) {
            throw toolkit::ToolFailure("NotStanding", "Spot must be standing before it can move; call stand_up first");
        }
        const double distance = args.at("distance_m").get<double>();
        const double turn = args.at("turn_deg").get<double>();
        detail::segmented_motion(distance, ctx, [&](double seg) {
            graph.publish(rosa, "/spot/cmd_move", Json{{"forward_m", seg}});
        });
        if (turn != 0) {
            ctx.actuate([&] { graph.publish(rosa, "/spot/cmd_move", Json{{"turn_deg", turn}}); });
        }
        const auto p = state().pose;
        return Json("Moved forward " + format_number(distance) + " m and turned " + format_number(turn) +
                    " degrees. Pose is now (" + format_number(p.x) + ", " + format_number(p.y) + ", " +
                    format_number(p.theta) + ").");
    });

    toolkit::ToolSpec camera;
    camera.name = "describe_camera";
    camera.description = "Describe what the robot camera sees, or show the live feed in rqt with show_feed.";
    camera.params = {{"show_feed", ValueType::Boolean, false, Json(false), "Open the live camera feed for the operator."}};
    registry.register_tool(camera, [this, &graph, rosa](const Json& args, toolkit::ToolContext&) {
        if (args.at("show_feed").get<bool>()) {
            graph.publish(rosa, "/spot/camera/display", Json{{"data", true}});
            return Json("The camera feed is now displayed in rqt.");
        }
        return Json(description_);
    });
}

}  // namespace rosa::scenarios
