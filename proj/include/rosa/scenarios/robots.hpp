#pragma once

#include "rosa/scenarios/scenario.hpp"
#include "rosa/toolkit/registry.hpp"

#include <mutex>
#include <optional>
#include <vector>

namespace rosa::scenarios {

struct Pose2D {
    double x = 0;
    double y = 0;
    double theta = 0;  // degrees in (-180, 180]

    bool operator==(const Pose2D&) const = default;
};

// Into (-180, 180].
double normalize_heading(double degrees);
// Into [0, 360).
double normalize_yaw(double degrees);

// Largest distance covered between two actuation checkpoints.
inline constexpr double kMotionSegmentM = 0.25;

class Robot {
public:
    virtual ~Robot() = default;

    // Adds the robot's driver nodes to the graph and its tools to the registry.
    virtual void bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) = 0;
    virtual Json state_json() const = 0;
};

// The plain ROS demo: status tools only, no actuators.
class DemoRobot : public Robot {
public:
    void bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) override;
    Json state_json() const override { return Json::object(); }
};

struct SpotState {
    bool standing = false;
    Pose2D pose;
    bool camera_feed_displayed = false;
};

class SpotRobot : public Robot {
public:
    static constexpr std::size_t kButtonB = 1;

    explicit SpotRobot(std::string camera_description) : description_(std::move(camera_description)) {}

    void bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) override;
    Json state_json() const override;
    SpotState state() const;

private:
    std::string description_;
    mutable std::mutex mutex_;
    SpotState state_;
};

struct EelsState {
    Pose2D pose;
    bool head_raised = false;
    double heading_error_deg = 0.3;
};

class EelsRobot : public Robot {
public:
    EelsRobot(double heading_error_deg, std::string camera_description);

    void bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) override;
    Json state_json() const override;
    EelsState state() const;

private:
    std::string description_;
    mutable std::mutex mutex_;
    EelsState state_;
};

struct Snapshot {
    double yaw = 0;
    graphsim::Tick tick = 0;
};

struct CarterState {
    Pose2D pose;
    double camera_yaw = 0;
    double fov_deg = 90;
    double obstacle_distance_m = 4.0;
    double progress_m = 0;
    std::vector<Snapshot> snapshots;
};

class CarterRobot : public Robot {
public:
    CarterRobot(double obstacle_distance_m, double fov_deg, std::string camera_description);

    void bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) override;
    Json state_json() const override;
    CarterState state() const;
    double clearance() const;

private:
    std::string description_;
    mutable std::mutex mutex_;
    CarterState state_;
};

}  // namespace rosa::scenarios
