#pragma once

#include <cstdint>
#include <vector>

#include "swarmplan/geometry.hpp"

namespace swarmplan {

// Dense 3D occupancy grid. Cell (ix,iy,iz) spans the closed box
// [origin + i*vs, origin + (i+1)*vs] along each axis.
// Immutable after scenario load; all queries are const and thread-safe.
class VoxelMap {
public:
    VoxelMap() = default;
    VoxelMap(const Vec3& origin, double voxel_size, const Vec3i& dims);

    const Vec3& origin() const { return origin_; }
    double voxelSize() const { return voxel_size_; }
    const Vec3i& dims() const { return dims_; }
    std::size_t cellCount() const { return occ_.size(); }

    Box3 bounds() const {
        return {origin_, origin_ + voxel_size_ * dims_.cast<double>()};
    }

    bool inBounds(const Vec3i& c) const {
        return (c.array() >= 0).all() && (c.array() < dims_.array()).all();
    }
    std::size_t index(const Vec3i& c) const {
        return static_cast<std::size_t>(c.x()) +
               static_cast<std::size_t>(dims_.x()) *
                   (static_cast<std::size_t>(c.y()) +
                    static_cast<std::size_t>(dims_.y()) * static_cast<std::size_t>(c.z()));
    }
    bool occupied(const Vec3i& c) const { return occ_[index(c)] != 0; }
    void setOccupied(const Vec3i& c, bool value = true) { occ_[index(c)] = value ? 1 : 0; }

    Box3 cellBox(const Vec3i& c) const {
        const Vec3 lo = origin_ + voxel_size_ * c.cast<double>();
        return {lo, lo + Vec3::Constant(voxel_size_)};
    }

    // Marks every cell with positive-measure overlap with `box` occupied.
    void addObstacleBox(const Box3& box);
    const std::vector<Box3>& obstacleBoxes() const { return obstacle_boxes_; }

    // Clamped index range of cells whose boxes overlap `box`.
    void cellRange(const Box3& box, Vec3i& lo, Vec3i& hi) const;

    bool anyOccupiedOverlapping(const Box3& box) const;

    std::size_t occupiedCount() const;

private:
    Vec3 origin_{0.0, 0.0, 0.0};
    double voxel_size_ = 0.1;
    Vec3i dims_{0, 0, 0};
    std::vector<std::uint8_t> occ_;
    std::vector<Box3> obstacle_boxes_;
};

// True iff `box` inflated by `inflation` on all faces stays inside the map
// bounds and has no positive-measure overlap with any occupied voxel.
// Grazing contact (clearance exactly `inflation`) is free.
bool boxInFreeSpace(const VoxelMap& map, const Box3& box, double inflation);

// Convenience for point clearance queries.
inline bool pointInFreeSpace(const VoxelMap& map, const Vec3& p, double inflation) {
    return boxInFreeSpace(map, Box3{p, p}, inflation);
}

}  // namespace swarmplan
