#include "swarmplan/time_allocation.hpp"

#include <algorithm>
#include <cmath>

namespace swarmplan {

namespace {

// Alg-style scan: advance through the set sequence as the trajectory passes
// through intersections, emitting one transition time per set switch.
template <typename Membership>
std::vector<double> scanPartial(int l, int n_sets, const Membership& inside, double t_step,
                                bool delay, bool allow_gap) {
    std::vector<double> times;
    const double total = (l - 1) * t_step;
    auto clampTime = [&](double t) { return std::min(std::max(t, 0.0), total); };

    int m = 0;
    for (int n = 0; n < l; ++n) {
        if (m >= n_sets - 1) break;
        if (inside(m, n) && inside(m + 1, n)) {
            int count = 1;
            while (n + count < l && inside(m, n + count) && inside(m + 1, n + count)) ++count;
            const int middle = n + count / 2;
            times.push_back(clampTime(middle * t_step));
            n = middle;
            ++m;
        } else if (allow_gap && inside(m + 1, n)) {
            // No waypoint lies in the intersection; transition between
            // waypoints, delayed by half a step to dodge simultaneous
            // corridor switches.
            const double shift = delay ? 0.5 : 0.0;
            times.push_back(clampTime((n + shift) * t_step));
            ++m;
        }
    }
    return times;
}

}  // namespace

std::vector<double> partialTimeSegmentBoxes(const std::vector<Vec3>& traj,
                                            const std::vector<Corridor>& sets,
                                            double t_step) {
    auto inside = [&](int m, int n) { return sets[m].box.contains(traj[n], kGeomEps); };
    // The gap branch never fires for corridors built by the axis-search
    // (consecutive boxes always share a waypoint), but the scan keeps it for
    // uniformity with the half-space case.
    return scanPartial(static_cast<int>(traj.size()), static_cast<int>(sets.size()), inside,
                       t_step, true, true);
}

std::vector<double> partialTimeSegmentHalfSpaces(const std::vector<Vec3>& traj,
                                                 const std::vector<HalfSpace>& sets,
                                                 double t_step, bool delay) {
    auto inside = [&](int m, int n) { return sets[m].contains(traj[n]); };
    return scanPartial(static_cast<int>(traj.size()), static_cast<int>(sets.size()), inside,
                       t_step, delay, true);
}

TimeSegments mergeTimeSegments(const std::vector<std::vector<double>>& agent_partials,
                               const std::vector<std::vector<double>>& pair_partials,
                               int l_max, double t_step) {
    TimeSegments out;
    const double total = (l_max - 1) * t_step;

    std::vector<double> knots;
    knots.push_back(0.0);
    knots.push_back(total);
    for (const auto* group : {&agent_partials, &pair_partials})
        for (const auto& partial : *group)
            for (double t : partial)
                if (t > 0.0 && t < total) knots.push_back(t);

    // All times are (integer + {0,.5}) * t_step, so exact equality dedup is
    // the intended semantics - no tolerance-based knot merging.
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    out.knots = std::move(knots);

    const int m_count = out.segmentCount();
    auto assign = [&](const std::vector<double>& partial) {
        std::vector<int> idx(m_count, 0);
        for (int m = 0; m < m_count; ++m) {
            const double seg_start = out.knots[m];
            int q = 0;
            while (q < static_cast<int>(partial.size()) && partial[q] <= seg_start) ++q;
            idx[m] = q;
        }
        return idx;
    };
    for (const auto& partial : agent_partials) out.sfc_of_segment.push_back(assign(partial));
    for (const auto& partial : pair_partials) out.rsfc_of_segment.push_back(assign(partial));
    return out;
}

}  // namespace swarmplan
