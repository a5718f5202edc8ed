#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "swarmplan/scenario.hpp"
#include "swarmplan/voxel_map.hpp"

namespace swarmplan {

// Lattice of candidate flight positions derived from the voxel map:
// nodes at origin + (ix*grid_xy, iy*grid_xy, iz*grid_z), 6-connected axis
// moves plus wait. Per-agent masks block nodes whose clearance sphere
// (conservative box) of radius r^i collides or leaves the map.
struct GridGraph {
    Vec3 origin{0.0, 0.0, 0.0};
    double step_xy = 0.5;
    double step_z = 1.0;
    Vec3i n{0, 0, 0};  // node counts per axis
    std::vector<std::vector<std::uint8_t>> blocked;  // [agent][node]

    int nodeCount() const { return n.x() * n.y() * n.z(); }
    int nodeId(const Vec3i& c) const { return c.x() + n.x() * (c.y() + n.y() * c.z()); }
    Vec3i nodeCoord(int id) const {
        const int xy = n.x() * n.y();
        return {id % n.x(), (id / n.x()) % n.y(), id / xy};
    }
    bool inRange(const Vec3i& c) const {
        return (c.array() >= 0).all() && (c.array() < n.array()).all();
    }
    Vec3 nodePos(const Vec3i& c) const {
        return origin + Vec3(c.x() * step_xy, c.y() * step_xy, c.z() * step_z);
    }
    Vec3 nodePos(int id) const { return nodePos(nodeCoord(id)); }
    bool isBlocked(int agent, int node) const { return blocked[agent][node] != 0; }

    // Nearest node to p by lattice rounding; returns nullopt when the rounded
    // coordinate leaves the lattice.
    std::optional<Vec3i> nearestCoord(const Vec3& p) const;
};

GridGraph buildGridGraph(const VoxelMap& map, const std::vector<AgentSpec>& agents,
                         const PlannerConfig& config);

// Space-time constraints produced by the high-level search.
struct VertexConstraint {
    int node;
    int t;
    bool operator==(const VertexConstraint&) const = default;
};
struct EdgeConstraint {
    int from;
    int to;
    int t;  // departure time
    bool operator==(const EdgeConstraint&) const = default;
};

struct ConstraintSet {
    std::unordered_set<std::uint64_t> vertex;  // key(node, t)
    std::unordered_set<std::uint64_t> edge;    // key(from, to, t)
    int max_goal_constraint_t = -1;            // latest vertex-constraint time on the goal node

    static std::uint64_t vkey(int node, int t) {
        return (static_cast<std::uint64_t>(node) << 24) | static_cast<std::uint64_t>(t);
    }
    static std::uint64_t ekey(int from, int to, int t) {
        return (static_cast<std::uint64_t>(from) << 44) |
               (static_cast<std::uint64_t>(to) << 24) | static_cast<std::uint64_t>(t);
    }
    bool blocksVertex(int node, int t) const { return vertex.count(vkey(node, t)) != 0; }
    bool blocksEdge(int from, int to, int t) const { return edge.count(ekey(from, to, t)) != 0; }
};

// Other agents' committed paths, used for conflict-count tie-breaking in the
// focal searches. Entries beyond a path's end mean the agent rests at its goal.
struct ConflictAvoidanceTable {
    const std::vector<std::vector<int>>* paths = nullptr;  // node ids per agent
    int skip_agent = -1;

    int vertexConflicts(int node, int t) const;
    int edgeConflicts(int from, int to, int t) const;
};

struct LowLevelResult {
    std::vector<int> path;  // node ids, path[t] for t = 0..cost
    long long cost = 0;     // arrival time after which the agent rests at its goal
    long long f_min = 0;    // lower bound on the constrained optimum
    long long expansions = 0;
};

enum class SearchOutcome { Found, NoPath, BudgetExceeded };

// Bounded-suboptimal space-time A* (focal search). On Found, `out` holds a
// path satisfying `constraints` with cost <= bound * constrained optimum;
// ties in the focal list prefer fewer conflicts against `cat`.
SearchOutcome ecbsLowLevel(const GridGraph& graph, int agent, int start_node,
                           int goal_node, const ConstraintSet& constraints, double bound,
                           const ConflictAvoidanceTable& cat, long long expansion_budget,
                           LowLevelResult& out);

struct DiscretePlan {
    // All agents share length l_max; waypoints in world coordinates.
    std::vector<std::vector<Vec3>> waypoints;
    // Grid node id per waypoint, used for conflict checks (-1 for the appended
    // off-grid start/goal points).
    std::vector<std::vector<int>> nodes;
    int l_max = 0;
    long long cost = 0;         // sum of pre-padding path costs
    long long lower_bound = 0;  // ECBS certificate: cost <= ecbs_bound * optimum
};

enum class MapfFailure { None, Unreachable, Timeout };

struct MapfResult {
    bool ok = false;
    MapfFailure failure = MapfFailure::None;
    std::string message;
    DiscretePlan plan;
    long long expansions = 0;
};

MapfResult planDiscrete(const VoxelMap& map, const std::vector<AgentSpec>& agents,
                        const PlannerConfig& config);

// Independent conflict scanner used by tests and the pipeline: returns a
// human-readable description of the first vertex/edge conflict, or empty.
// Rest-at-goal semantics: positions beyond an agent's path end stay at its
// last node.
std::string findPlanConflict(const std::vector<std::vector<int>>& paths);

}  // namespace swarmplan
