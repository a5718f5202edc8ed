#include "swarmplan/rsfc.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace swarmplan {

double halfspaceMargin(const AgentSpec& a, const AgentSpec& b, Dir dir,
                       const PlannerConfig& config) {
    const double lateral = a.radius + b.radius;
    return axisOf(dir) == 2 ? config.downwash * lateral : lateral;
}

std::vector<Vec3> relativeWaypoints(const DiscretePlan& plan, int agent_a, int agent_b) {
    const auto& pa = plan.waypoints[agent_a];
    const auto& pb = plan.waypoints[agent_b];
    std::vector<Vec3> rel(pa.size());
    for (std::size_t k = 0; k < pa.size(); ++k) rel[k] = pb[k] - pa[k];
    return rel;
}

RsfcSequence buildRsfc(const DiscretePlan& plan, const std::vector<AgentSpec>& agents,
                       int agent_a, int agent_b, const PlannerConfig& config) {
    RsfcSequence seq;
    seq.agent_a = agent_a;
    seq.agent_b = agent_b;

    const std::vector<Vec3> rel = relativeWaypoints(plan, agent_a, agent_b);
    const int l = static_cast<int>(rel.size());

    // Forward pass: run lengths of consecutive waypoints selectable per
    // direction (strict positivity along the direction's axis).
    std::vector<std::array<int, kNumDirs>> runs(l);
    for (int k = 0; k < l; ++k) {
        if (rel[k].norm() == 0.0)
            throw std::runtime_error("rsfc: zero relative waypoint at index " +
                                     std::to_string(k) + " (conflicting plans)");
        for (int m = 0; m < kNumDirs; ++m) {
            const Dir dir = static_cast<Dir>(m);
            const bool selectable = signOf(dir) * rel[k][axisOf(dir)] > 0.0;
            runs[k][m] = selectable ? (k > 0 ? runs[k - 1][m] + 1 : 1) : 0;
        }
    }

    // Backward greedy pass: repeatedly take the direction with the longest
    // run ending at the current index, never opposite to the previous pick.
    std::vector<Dir> dirs_rev;
    std::vector<std::pair<int, int>> covers_rev;
    int k = l - 1;
    int banned = -1;  // opposite of the previously selected direction
    while (k >= 0) {
        int best = -1;
        int best_run = 0;
        for (int m = 0; m < kNumDirs; ++m) {
            if (m == banned) continue;
            if (runs[k][m] > best_run) {
                best_run = runs[k][m];
                best = m;
            }
        }
        if (best < 0)
            throw std::runtime_error("rsfc: no admissible direction at index " +
                                     std::to_string(k));
        dirs_rev.push_back(static_cast<Dir>(best));
        covers_rev.emplace_back(k - best_run + 1, k);
        k -= best_run;
        banned = static_cast<int>(opposite(static_cast<Dir>(best)));
    }

    for (std::size_t m = dirs_rev.size(); m-- > 0;) {
        const Dir dir = dirs_rev[m];
        seq.halfspaces.push_back(
            {dir, halfspaceMargin(agents[agent_a], agents[agent_b], dir, config)});
        seq.covers.push_back(covers_rev[m]);
    }
    return seq;
}

}  // namespace swarmplan
