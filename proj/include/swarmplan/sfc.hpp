#pragma once

#include <string>
#include <vector>

#include "swarmplan/mapf.hpp"
#include "swarmplan/scenario.hpp"
#include "swarmplan/voxel_map.hpp"

namespace swarmplan {

// One obstacle-free axis-aligned box along an agent's initial trajectory,
// assigned a contiguous waypoint index range [cover_lo, cover_hi].
struct Corridor {
    Box3 box;
    int cover_lo = 0;
    int cover_hi = 0;
};

struct CorridorSequence {
    int agent = 0;  // index into the agent list
    std::vector<Corridor> corridors;
};

// Axis-search construction: seed a box of side `init_box_size` at every
// waypoint, connect each box to the previous waypoint, expand all six faces
// one voxel step at a time until blocked, then drop boxes contained in a
// neighbor. Clearance is enforced as per-axis inflation by the agent radius.
CorridorSequence buildSfc(const VoxelMap& map, const DiscretePlan& plan, int agent,
                          double radius, const PlannerConfig& config);

struct SfcViolation {
    enum class Kind { ObstacleCollision, OutOfBounds, Disconnected, CoverageGap, WaypointOutside };
    Kind kind;
    int corridor = -1;
    std::string detail;
};

// Independent validator: re-checks obstacle clearance by direct voxel scan,
// sequential overlap, and waypoint coverage. Shares no code with buildSfc.
std::vector<SfcViolation> checkSfc(const CorridorSequence& seq, const VoxelMap& map,
                                   const DiscretePlan& plan, double radius);

}  // namespace swarmplan
