#include "rosa/scenarios/robots.hpp"

#include <cmath>

namespace rosa::scenarios {

double normalize_heading(double degrees) {
    double r = std::fmod(degrees, 360.0);
    if (r <= -180.0) {
        r += 360.0;
    } else if (r > 180.0) {
        r -= 360.0;
    }
    return r;
}

double normalize_yaw(double degrees) {
    double r = std::fmod(degrees, 360.0);
    if (r < 0) {
        r += 360.0;
    }
    return r >= 360.0 ? 0.0 : r;
}

void DemoRobot::bind(graphsim::Graph& graph, toolkit::ToolRegistry& registry) {
    using toolkit::ToolSpec;
    registry.register_tool(
        ToolSpec{"get_robot_status", "Get the overall robot status and the subsystems that can be queried.", {}},
        [&graph](const Json&, toolkit::ToolContext&) {
            return Json{{"status", "nominal"},
                        {"node_count", graph.snapshot().nodes.size()},
                        {"subsystems", {"battery", "cpu"}}};
        });
    registry.register_tool(ToolSpec{"get_battery_status", "Get battery charge and voltage.", {}},
                           [](const Json&, toolkit::ToolContext&) {
                               return Json{{"charge_percent", 82}, {"voltage_v", 24.6}, {"status", "ok"}};
                           });
    registry.register_tool(ToolSpec{"get_cpu_status", "Get CPU load and temperature.", {}},
                           [](const Json&, toolkit::ToolContext&) {
                               return Json{{"load_percent", 37}, {"temperature_c", 51.5}, {"status", "ok"}};
                           });
}

}  // namespace rosa::scenarios
