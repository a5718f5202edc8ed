#pragma once

#include <vector>

#include "swarmplan/rsfc.hpp"
#include "swarmplan/sfc.hpp"

namespace swarmplan {

// Shared knot vector with per-segment convex-set assignments.
struct TimeSegments {
    std::vector<double> knots;  // strictly increasing, knots.front()=0, back()=T
    // Index of the active corridor of agent i during segment m.
    std::vector<std::vector<int>> sfc_of_segment;
    // Index of the active half-space of pair p during segment m.
    std::vector<std::vector<int>> rsfc_of_segment;

    int segmentCount() const { return static_cast<int>(knots.size()) - 1; }
    double totalTime() const { return knots.back(); }
};

// Transition times of one convex-set sequence along its trajectory, scanning
// for the middle waypoint of each intersection run. When no waypoint lies in
// the intersection (only possible for half-space sequences) the transition is
// delayed by half a step when `delay` is set, or pinned to the first waypoint
// inside the next set otherwise. All waypoint k times are k*t_step; emitted
// values are clamped to [0, T] and returned in transition order (entry q is
// the switch from set q to set q+1).
std::vector<double> partialTimeSegmentBoxes(const std::vector<Vec3>& traj,
                                            const std::vector<Corridor>& sets,
                                            double t_step);
std::vector<double> partialTimeSegmentHalfSpaces(const std::vector<Vec3>& traj,
                                                 const std::vector<HalfSpace>& sets,
                                                 double t_step, bool delay);

// Sorted exact-dedup union of all partial segments with 0 and T appended,
// plus per-agent and per-pair set assignments for every merged segment.
TimeSegments mergeTimeSegments(const std::vector<std::vector<double>>& agent_partials,
                               const std::vector<std::vector<double>>& pair_partials,
                               int l_max, double t_step);

}  // namespace swarmplan
