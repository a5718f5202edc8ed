#pragma once

#include <Eigen/Dense>

namespace swarmplan {

using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;

// Slack for geometric predicates on incrementally-built boxes.
constexpr double kGeomEps = 1e-9;

// Closed axis-aligned box [lo, hi].
struct Box3 {
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{0.0, 0.0, 0.0};

    static Box3 fromCenter(const Vec3& center, const Vec3& half_extents) {
        return {center - half_extents, center + half_extents};
    }

    bool wellFormed() const { return (lo.array() <= hi.array()).all(); }
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 size() const { return hi - lo; }

    bool contains(const Vec3& p, double eps = 0.0) const {
        return (p.array() >= lo.array() - eps).all() && (p.array() <= hi.array() + eps).all();
    }
    // Strict interior membership (boundary points excluded).
    bool containsInterior(const Vec3& p) const {
        return (p.array() > lo.array()).all() && (p.array() < hi.array()).all();
    }
    // Containment with a slack of `eps` per face, absorbing accumulated
    // rounding from incremental face stepping.
    bool containsBox(const Box3& b, double eps = 0.0) const {
        return (b.lo.array() >= lo.array() - eps).all() &&
               (b.hi.array() <= hi.array() + eps).all();
    }
    // Overlap of measure greater than eps per axis; boxes that merely share a
    // face (or overlap within rounding noise) do not overlap.
    bool overlaps(const Box3& b, double eps = 0.0) const {
        return (lo.array() + eps < b.hi.array()).all() &&
               (b.lo.array() + eps < hi.array()).all();
    }
    // Nonempty closed intersection; sharing a face or corner counts.
    bool touches(const Box3& b) const {
        return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all();
    }
    Box3 inflated(double r) const {
        return {lo - Vec3::Constant(r), hi + Vec3::Constant(r)};
    }
    Box3 intersection(const Box3& b) const {
        return {lo.cwiseMax(b.lo), hi.cwiseMin(b.hi)};
    }
};

// Axis directions in the candidate iteration order +x,+y,+z,-x,-y,-z.
enum class Dir : int { PX = 0, PY = 1, PZ = 2, NX = 3, NY = 4, NZ = 5 };

constexpr int kNumDirs = 6;

inline Dir opposite(Dir d) {
    return static_cast<Dir>((static_cast<int>(d) + 3) % 6);
}
inline int axisOf(Dir d) { return static_cast<int>(d) % 3; }
inline double signOf(Dir d) { return static_cast<int>(d) < 3 ? 1.0 : -1.0; }
inline Vec3 unitNormal(Dir d) {
    Vec3 n = Vec3::Zero();
    n[axisOf(d)] = signOf(d);
    return n;
}
inline const char* dirName(Dir d) {
    static const char* names[kNumDirs] = {"+x", "+y", "+z", "-x", "-y", "-z"};
    return names[static_cast<int>(d)];
}

}  // namespace swarmplan
