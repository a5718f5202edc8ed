#include "swarmplan/sfc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swarmplan {

namespace {

// Grows the face of `box` on the side of `target` until the box contains it,
// one voxel step at a time, keeping Eq-style clearance. Returns false when an
// obstacle or the map boundary blocks the connection.
bool expandToward(Box3& box, const Vec3& target, const VoxelMap& map, double radius) {
    const double step = map.voxelSize();
    for (int axis = 0; axis < 3; ++axis) {
        while (target[axis] < box.lo[axis]) {
            Box3 candidate = box;
            candidate.lo[axis] = std::max(box.lo[axis] - step, target[axis]);
            if (!boxInFreeSpace(map, candidate, radius)) return false;
            box = candidate;
        }
        while (target[axis] > box.hi[axis]) {
            Box3 candidate = box;
            candidate.hi[axis] = std::min(box.hi[axis] + step, target[axis]);
            if (!boxInFreeSpace(map, candidate, radius)) return false;
            box = candidate;
        }
    }
    return true;
}

// Round-robin face expansion in the fixed order +x,-x,+y,-y,+z,-z. A face is
// retired permanently once its next step fails: later growth of other faces
// only enlarges the blocked sweep, so the face stays blocked.
void expandAllFaces(Box3& box, const VoxelMap& map, double radius) {
    const double step = map.voxelSize();
    bool face_open[6] = {true, true, true, true, true, true};
    bool any = true;
    while (any) {
        any = false;
        for (int f = 0; f < 6; ++f) {
            if (!face_open[f]) continue;
            const int axis = f / 2;
            const bool positive = (f % 2) == 0;
            Box3 candidate = box;
            if (positive)
                candidate.hi[axis] += step;
            else
                candidate.lo[axis] -= step;
            if (boxInFreeSpace(map, candidate, radius)) {
                box = candidate;
                any = true;
            } else {
                face_open[f] = false;
            }
        }
    }
}

}  // namespace

CorridorSequence buildSfc(const VoxelMap& map, const DiscretePlan& plan, int agent,
                          double radius, const PlannerConfig& config) {
    CorridorSequence seq;
    seq.agent = agent;
    const auto& wp = plan.waypoints[agent];
    const int l = static_cast<int>(wp.size());
    const double half = 0.5 * config.init_box_size;

    seq.corridors.reserve(l);
    for (int k = 0; k < l; ++k) {
        Corridor c;
        c.cover_lo = c.cover_hi = k;
        c.box = Box3::fromCenter(wp[k], Vec3::Constant(half));
        // Clip the seed so it starts feasible even near walls or map edges.
        const Box3 room = map.bounds().inflated(-radius);
        c.box.lo = c.box.lo.cwiseMax(room.lo).cwiseMin(wp[k]);
        c.box.hi = c.box.hi.cwiseMin(room.hi).cwiseMax(wp[k]);
        while (!boxInFreeSpace(map, c.box, radius)) {
            // Shrink toward the waypoint; the waypoint itself is free by the
            // upstream invariant.
            const Vec3 lo_gap = wp[k] - c.box.lo;
            const Vec3 hi_gap = c.box.hi - wp[k];
            if (lo_gap.maxCoeff() < 1e-12 && hi_gap.maxCoeff() < 1e-12)
                throw std::runtime_error("sfc: waypoint " + std::to_string(k) +
                                         " of agent " + std::to_string(agent) +
                                         " is in collision");
            c.box.lo = wp[k] - 0.5 * lo_gap;
            c.box.hi = wp[k] + 0.5 * hi_gap;
        }
        seq.corridors.push_back(c);
    }

    // Connect every corridor to the previous waypoint, then maximize.
    for (int k = 0; k < l; ++k) {
        Box3& box = seq.corridors[k].box;
        if (k > 0) expandToward(box, wp[k - 1], map, radius);
        expandAllFaces(box, map, radius);
    }

    // Delete corridors contained in a neighbor, merging cover ranges.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < seq.corridors.size(); ++i) {
            Corridor& a = seq.corridors[i];
            Corridor& b = seq.corridors[i + 1];
            if (b.box.containsBox(a.box, kGeomEps)) {
                b.cover_lo = a.cover_lo;
                seq.corridors.erase(seq.corridors.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
            if (a.box.containsBox(b.box, kGeomEps)) {
                a.cover_hi = b.cover_hi;
                seq.corridors.erase(seq.corridors.begin() + static_cast<long>(i) + 1);
                changed = true;
                break;
            }
        }
    }
    return seq;
}

std::vector<SfcViolation> checkSfc(const CorridorSequence& seq, const VoxelMap& map,
                                   const DiscretePlan& plan, double radius) {
    std::vector<SfcViolation> out;
    const auto& wp = plan.waypoints[seq.agent];
    const auto& cs = seq.corridors;

    for (std::size_t m = 0; m < cs.size(); ++m) {
        const Box3 inflated = cs[m].box.inflated(radius);
        if (!map.bounds().containsBox(inflated, kGeomEps)) {
            out.push_back({SfcViolation::Kind::OutOfBounds, static_cast<int>(m),
                           "inflated box leaves map bounds"});
        }
        // Direct voxel scan, independent of the builder's free-space query.
        bool hit = false;
        for (int z = 0; z < map.dims().z() && !hit; ++z)
            for (int y = 0; y < map.dims().y() && !hit; ++y)
                for (int x = 0; x < map.dims().x() && !hit; ++x) {
                    const Vec3i c(x, y, z);
                    if (map.occupied(c) && map.cellBox(c).overlaps(inflated, kGeomEps)) hit = true;
                }
        if (hit)
            out.push_back({SfcViolation::Kind::ObstacleCollision, static_cast<int>(m),
                           "inflated box overlaps an occupied voxel"});

        for (int k = cs[m].cover_lo; k <= cs[m].cover_hi; ++k) {
            if (k < 0 || k >= static_cast<int>(wp.size()) ||
                !cs[m].box.contains(wp[k], kGeomEps)) {
                std::ostringstream os;
                os << "waypoint " << k << " outside its corridor";
                out.push_back({SfcViolation::Kind::WaypointOutside, static_cast<int>(m), os.str()});
            }
        }
        if (m + 1 < cs.size() && !cs[m].box.touches(cs[m + 1].box))
            out.push_back({SfcViolation::Kind::Disconnected, static_cast<int>(m),
                           "no intersection with the next corridor"});
    }

    int expect = 0;
    for (std::size_t m = 0; m < cs.size(); ++m) {
        if (cs[m].cover_lo != expect) {
            out.push_back({SfcViolation::Kind::CoverageGap, static_cast<int>(m),
                           "cover ranges are not a partition"});
            break;
        }
        expect = cs[m].cover_hi + 1;
    }
    if (!cs.empty() && expect != static_cast<int>(wp.size()))
        out.push_back({SfcViolation::Kind::CoverageGap, -1, "covers do not reach the last waypoint"});

    return out;
}

}  // namespace swarmplan
