#include "motion.hpp"

#include "rosa/models/script.hpp"

#include <algorithm>

namespace rosa::scenarios {

using detail::radians;
using models::format_number;

CarterRobot::CarterRobot(double obstacle_distance_m, double fov_deg, std::string camera_description)
    : description_(std::move(camera_description)) {
    state_.obstacle_distance_m = obstacle_distance_m;
    state_.fov_deg = fov_deg;
}

CarterState CarterRobot::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

double CarterRobot::clearance() const {
    std::lock_guard lock(mutex_);
    return std::max(0.0, state_.obstacle_distance_m - state_.progress_m);
}

Json CarterRobot::state_json() const {
    const auto s = state();
    Json snaps = Json::array();
    for (const auto& snap : s.snapshots) {
        snaps.push_back({{"yaw", snap.yaw}, {"tick", snap.tick}});
    }
    return {{"pose", detail::pose_json(s.pose)}, {"camera_yaw", s.camera_yaw}, {"fov_deg", s.fov_deg},
            {"obstacle_distance_m", s.obstacle_distance_m}, {"progress_m", s.progress_m}, {"snapshots", snaps}};
}

void CarterRobot::bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) {
    const auto rosa = graph.register_node(
        "/rosa", {{"/carter/cmd_forward", "rosa_msgs/Forward"}, {"/carter/camera_rotate", "CarterCameraRotate"}});
    graph.register_node("/carter/driver", {},
                        {{"/carter/cmd_forward",
                          [this](const Json& msg) {
                              std::lock_guard lock(mutex_);
                              const double d = msg.at("forward_m").get<double>();
                              state_.pose.x += d * std::cos(radians(state_.pose.theta));
                              state_.pose.y += d * std::sin(radians(state_.pose.theta));
                              state_.progress_m += d;
                          },
                          "rosa_msgs/Forward"},
                         {"/carter/camera_rotate", [this](const Json& msg) {
                              std::lock_guard lock(mutex_);
                              state_.camera_yaw = normalize_yaw(state_.camera_yaw + msg.at("angle_deg").get<double>());
                          },
                          "CarterCameraRotate"}});

    toolkit::ToolSpec lidar;
    lidar.name = "lidar_scan";
    lidar.description = "Scan ahead with the LiDAR and report the distance to the nearest obstacle in meters.";
    registry.register_tool(lidar, [this](const Json&, toolkit::ToolContext&) {
        return Json{{"obstacle_distance_m", clearance()}};
    });

    toolkit::ToolSpec forward;
    forward.name = "move_forward";
    forward.description = "Drive straight ahead by a distance in meters. The distance must not exceed the obstacle clearance.";
    forward.params = {{"distance_m", ValueType::Number, true, std::nullopt, "Distance to drive in meters."}};
    forward.direction = toolkit::Direction::Uplink;
    forward.requires_confirmation = true;
    registry.register_tool(forward, [this, &graph, rosa](const Json& args, toolkit::ToolContext& ctx) {
        const double distance = args.at("distance_m").get<double>();
        if (distance < 0) {
            throw toolkit::ToolFailure("BadArgument", "distance_m must not be negative");
        }
        const double free = clearance();
        if (distance > free + 1e-9) {
            throw toolkit::ToolFailure("ObstacleViolation", "cannot move " + format_number(distance) +
                                                                " m: obstacle " + format_number(free) + " m ahead");
        }
        detail::segmented_motion(distance, ctx, [&](double seg) {
            graph.publish(rosa, "/carter/cmd_forward", Json{{"forward_m", seg}});
        });
        return Json("Moved forward " + format_number(distance) + " meters.");
    });

    toolkit::ToolSpec rotate;
    rotate.name = "rotate_camera";
    rotate.description = "Rotate the on-board camera sensor by a specified angle in degrees.";
    rotate.params = {{"angle", ValueType::Number, true, std::nullopt, "Angle to rotate in degrees."}};
    rotate.direction = toolkit::Direction::Uplink;
    registry.register_tool(rotate, [&graph, rosa](const Json& args, toolkit::ToolContext& ctx) {
        const double angle = args.at("angle").get<double>();
        ctx.actuate([&] {
            graph.publish(rosa, "/carter/camera_rotate", Json{{"angle_rad", radians(angle)}, {"angle_deg", angle}});
        });
        return Json("Camera rotated by " + format_number(angle) + " degrees.");
    });

    toolkit::ToolSpec snapshot;
    snapshot.name = "capture_snapshot";
    snapshot.description = "Capture a camera snapshot at the current camera yaw.";
    registry.register_tool(snapshot, [this, &graph](const Json&, toolkit::ToolContext&) {
        const auto tick = graph.mark();
        std::lock_guard lock(mutex_);
        state_.snapshots.push_back({state_.camera_yaw, tick});
        return Json{{"yaw", state_.camera_yaw}, {"tick", tick}};
    });

    toolkit::ToolSpec camera;
    camera.name = "describe_camera";
    camera.description = "Describe what the robot camera sees.";
    registry.register_tool(camera, [this](const Json&, toolkit::ToolContext&) { return Json(description_); });
}

}  // namespace rosa::scenarios
