#pragma once

#include "rosa/scenarios/robots.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace rosa::scenarios::detail {

inline double radians(double degrees) {
    return degrees * std::numbers::pi / 180.0;
}

// Covers `distance` in equal checkpoints of at most kMotionSegmentM, one
// actuation each. Returns the distance actually covered; throws Cancelled
// (with the covered distance in its message) when an e-stop lands between
// checkpoints.
inline double segmented_motion(double distance, toolkit::ToolContext& ctx, const std::function<void(double)>& step) {
    if (distance == 0) {
        return 0;
    }
    const auto n = static_cast<long>(std::ceil(std::fabs(distance) / kMotionSegmentM));
    const double seg = distance / static_cast<double>(n);
    double covered = 0;
    for (long k = 0; k < n; ++k) {
        if (k > 0) {
            ctx.delay(1);
        }
        try {
            ctx.actuate([&] { step(seg); });
        } catch (const toolkit::Cancelled&) {
            throw toolkit::Cancelled("motion cancelled by e-stop after " + std::to_string(covered) +
                                     " m; pose frozen at the last checkpoint");
        }
        covered += seg;
    }
    return covered;
}

inline Json pose_json(const Pose2D& p) {
    return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

}  // namespace rosa::scenarios::detail
