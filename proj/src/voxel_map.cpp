#include "swarmplan/voxel_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace swarmplan {

VoxelMap::VoxelMap(const Vec3& origin, double voxel_size, const Vec3i& dims)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims) {
    if (voxel_size <= 0.0) throw std::invalid_argument("voxel_size must be positive");
    if ((dims.array() <= 0).any()) throw std::invalid_argument("dims must be positive");
    occ_.assign(static_cast<std::size_t>(dims.x()) * dims.y() * dims.z(), 0);
}

void VoxelMap::cellRange(const Box3& box, Vec3i& lo, Vec3i& hi) const {
    for (int a = 0; a < 3; ++a) {
        // floor/ceil with a strict-overlap convention: a cell whose face only
        // touches the box has zero-measure overlap and is excluded.
        const double flo = (box.lo[a] - origin_[a]) / voxel_size_;
        const double fhi = (box.hi[a] - origin_[a]) / voxel_size_;
        lo[a] = std::max(0, static_cast<int>(std::floor(flo)));
        hi[a] = std::min(dims_[a] - 1, static_cast<int>(std::ceil(fhi)) - 1);
    }
}

void VoxelMap::addObstacleBox(const Box3& box) {
    if (!box.wellFormed()) throw std::invalid_argument("obstacle box min > max");
    obstacle_boxes_.push_back(box);
    Vec3i lo, hi;
    cellRange(box, lo, hi);
    for (int z = lo.z(); z <= hi.z(); ++z)
        for (int y = lo.y(); y <= hi.y(); ++y)
            for (int x = lo.x(); x <= hi.x(); ++x) {
                const Vec3i c(x, y, z);
                if (cellBox(c).overlaps(box)) setOccupied(c);
            }
}

bool VoxelMap::anyOccupiedOverlapping(const Box3& box) const {
    Vec3i lo, hi;
    cellRange(box, lo, hi);
    for (int z = lo.z(); z <= hi.z(); ++z)
        for (int y = lo.y(); y <= hi.y(); ++y)
            for (int x = lo.x(); x <= hi.x(); ++x) {
                const Vec3i c(x, y, z);
                if (occupied(c) && cellBox(c).overlaps(box, kGeomEps)) return true;
            }
    return false;
}

std::size_t VoxelMap::occupiedCount() const {
    return static_cast<std::size_t>(std::accumulate(occ_.begin(), occ_.end(), std::size_t{0}));
}

bool boxInFreeSpace(const VoxelMap& map, const Box3& box, double inflation) {
    if (!box.wellFormed()) throw std::invalid_argument("query box min > max");
    const Box3 inflated = box.inflated(inflation);
    if (!map.bounds().containsBox(inflated, kGeomEps)) return false;
    return !map.anyOccupiedOverlapping(inflated);
}

}  // namespace swarmplan
