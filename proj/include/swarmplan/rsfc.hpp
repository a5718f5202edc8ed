#pragma once

#include <vector>

#include "swarmplan/mapf.hpp"
#include "swarmplan/scenario.hpp"

namespace swarmplan {

// Open half-space {p : p . n > margin} with an axis-aligned normal.
struct HalfSpace {
    Dir dir = Dir::PX;
    double margin = 0.0;

    bool contains(const Vec3& p) const {
        return signOf(dir) * p[axisOf(dir)] > margin;
    }
};

// Separation margin between two agents along a candidate direction:
// r^i + r^j laterally, scaled by the downwash coefficient vertically.
double halfspaceMargin(const AgentSpec& a, const AgentSpec& b, Dir dir,
                       const PlannerConfig& config);

// Half-space cover of the relative initial trajectory p^b - p^a of one agent
// pair. covers[m] = [lo, hi] is the waypoint index run assigned to element m.
struct RsfcSequence {
    int agent_a = 0;
    int agent_b = 0;
    std::vector<HalfSpace> halfspaces;
    std::vector<std::pair<int, int>> covers;
};

// Greedy backward cover minimizing the number of direction transitions,
// subject to consecutive elements never being opposite directions. Ties in
// the argmax break in the order +x,+y,+z,-x,-y,-z. Throws when a relative
// waypoint is zero or no admissible direction exists at some index.
RsfcSequence buildRsfc(const DiscretePlan& plan, const std::vector<AgentSpec>& agents,
                       int agent_a, int agent_b, const PlannerConfig& config);

// Relative waypoints p^b[k] - p^a[k] for k = 0..l_max-1.
std::vector<Vec3> relativeWaypoints(const DiscretePlan& plan, int agent_a, int agent_b);

}  // namespace swarmplan
