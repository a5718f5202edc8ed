#pragma once

#include <vector>

#include "swarmplan/bernstein.hpp"
#include "swarmplan/qp_solver.hpp"
#include "swarmplan/rsfc.hpp"
#include "swarmplan/sfc.hpp"
#include "swarmplan/time_allocation.hpp"

namespace swarmplan {

// The team trajectory QP over stacked control points:
//   minimize sum_i sum_axis integral (d^n p / dt^n)^2
//   s.t.     start/goal position with zero velocity/acceleration,
//            continuity up to acceleration at interior knots,
//            control points inside assigned corridors,
//            relative control points inside assigned half-spaces.
struct QpProblem {
    int n_agents = 0;
    int n_segments = 0;
    int degree = 0;
    int n_vars = 0;
    int n_eq = 0;  // leading equality rows of A
    std::vector<double> knots;

    SparseMat P;  // 0.5 x'Px equals the derivative cost
    Eigen::VectorXd q;
    SparseMat A;
    Eigen::VectorXd l, u;

    // Variable layout: contiguous (N+1)-control blocks per (agent, axis,
    // segment), axis-major within an agent.
    int varIndex(int agent, int axis, int segment, int k) const {
        return ((agent * 3 + axis) * n_segments + segment) * (degree + 1) + k;
    }
};

// Pairs are ordered (a, b) with a < b, indexed in lexicographic order.
inline int pairIndex(int n_agents, int a, int b) {
    // index of (a,b) in the sequence (0,1),(0,2),...,(0,n-1),(1,2),...
    return a * n_agents - a * (a + 1) / 2 + (b - a - 1);
}

QpProblem assembleQp(const std::vector<AgentSpec>& agents,
                     const std::vector<CorridorSequence>& corridors,
                     const std::vector<RsfcSequence>& rsfcs, const TimeSegments& tsegs,
                     const PlannerConfig& config);

// Per-agent piecewise trajectories from the stacked solution vector.
std::vector<PiecewiseBernstein> extractTrajectories(const QpProblem& problem,
                                                    const Eigen::VectorXd& x);

}  // namespace swarmplan
