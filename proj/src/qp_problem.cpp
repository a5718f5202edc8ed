#include "swarmplan/qp_problem.hpp"

#include <limits>
#include <stdexcept>

namespace swarmplan {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

QpProblem assembleQp(const std::vector<AgentSpec>& agents,
                     const std::vector<CorridorSequence>& corridors,
                     const std::vector<RsfcSequence>& rsfcs, const TimeSegments& tsegs,
                     const PlannerConfig& config) {
    QpProblem qp;
    qp.n_agents = static_cast<int>(agents.size());
    qp.n_segments = tsegs.segmentCount();
    qp.degree = config.degree;
    qp.knots = tsegs.knots;
    const int N = qp.degree;
    const int nc = N + 1;
    const int M = qp.n_segments;
    qp.n_vars = 3 * qp.n_agents * M * nc;

    if (static_cast<int>(corridors.size()) != qp.n_agents)
        throw std::invalid_argument("assembleQp: one corridor sequence per agent required");
    const int n_pairs = qp.n_agents * (qp.n_agents - 1) / 2;
    if (static_cast<int>(rsfcs.size()) != n_pairs)
        throw std::invalid_argument("assembleQp: one half-space sequence per pair required");
    for (int a = 0; a < qp.n_agents; ++a)
        for (int m = 0; m < M; ++m)
            if (tsegs.sfc_of_segment[a][m] >=
                static_cast<int>(corridors[a].corridors.size()))
                throw std::invalid_argument("assembleQp: missing corridor assignment");

    // Cost: block-diagonal derivative-energy blocks per (agent, axis, segment).
    std::vector<Eigen::Triplet<double>> p_trips;
    for (int m = 0; m < M; ++m) {
        const double dt = tsegs.knots[m + 1] - tsegs.knots[m];
        if (dt <= 0.0) throw std::invalid_argument("assembleQp: non-increasing knots");
        // 0.5 x'Px = c'Qc  =>  P block = 2Q
        const Eigen::MatrixXd block = 2.0 * derivCostBlock(dt, N, config.deriv_order);
        for (int a = 0; a < qp.n_agents; ++a)
            for (int axis = 0; axis < 3; ++axis)
                for (int r = 0; r < nc; ++r)
                    for (int c = 0; c < nc; ++c) {
                        const double v = block(r, c);
                        if (v != 0.0)
                            p_trips.emplace_back(qp.varIndex(a, axis, m, r),
                                                 qp.varIndex(a, axis, m, c), v);
                    }
    }
    qp.P.resize(qp.n_vars, qp.n_vars);
    qp.P.setFromTriplets(p_trips.begin(), p_trips.end());
    qp.q = Eigen::VectorXd::Zero(qp.n_vars);

    // Equality rows: boundary conditions and C2 continuity, then inequalities.
    std::vector<Eigen::Triplet<double>> a_trips;
    std::vector<double> lo, hi;
    int row = 0;
    auto addRow = [&](double lb, double ub) {
        lo.push_back(lb);
        hi.push_back(ub);
        return row++;
    };

    for (int a = 0; a < qp.n_agents; ++a) {
        for (int axis = 0; axis < 3; ++axis) {
            // Rest-to-rest boundary conditions.
            const int r_p0 = addRow(agents[a].start[axis], agents[a].start[axis]);
            a_trips.emplace_back(r_p0, qp.varIndex(a, axis, 0, 0), 1.0);
            const int r_v0 = addRow(0.0, 0.0);
            a_trips.emplace_back(r_v0, qp.varIndex(a, axis, 0, 1), 1.0);
            a_trips.emplace_back(r_v0, qp.varIndex(a, axis, 0, 0), -1.0);
            const int r_a0 = addRow(0.0, 0.0);
            a_trips.emplace_back(r_a0, qp.varIndex(a, axis, 0, 2), 1.0);
            a_trips.emplace_back(r_a0, qp.varIndex(a, axis, 0, 1), -2.0);
            a_trips.emplace_back(r_a0, qp.varIndex(a, axis, 0, 0), 1.0);

            const int r_pT = addRow(agents[a].goal[axis], agents[a].goal[axis]);
            a_trips.emplace_back(r_pT, qp.varIndex(a, axis, M - 1, N), 1.0);
            const int r_vT = addRow(0.0, 0.0);
            a_trips.emplace_back(r_vT, qp.varIndex(a, axis, M - 1, N), 1.0);
            a_trips.emplace_back(r_vT, qp.varIndex(a, axis, M - 1, N - 1), -1.0);
            const int r_aT = addRow(0.0, 0.0);
            a_trips.emplace_back(r_aT, qp.varIndex(a, axis, M - 1, N), 1.0);
            a_trips.emplace_back(r_aT, qp.varIndex(a, axis, M - 1, N - 1), -2.0);
            a_trips.emplace_back(r_aT, qp.varIndex(a, axis, M - 1, N - 2), 1.0);

            // Position, velocity, acceleration continuity at interior knots.
            for (int m = 0; m + 1 < M; ++m) {
                const double dt0 = tsegs.knots[m + 1] - tsegs.knots[m];
                const double dt1 = tsegs.knots[m + 2] - tsegs.knots[m + 1];
                const int r_p = addRow(0.0, 0.0);
                a_trips.emplace_back(r_p, qp.varIndex(a, axis, m, N), 1.0);
                a_trips.emplace_back(r_p, qp.varIndex(a, axis, m + 1, 0), -1.0);

                const int r_v = addRow(0.0, 0.0);
                a_trips.emplace_back(r_v, qp.varIndex(a, axis, m, N), 1.0 / dt0);
                a_trips.emplace_back(r_v, qp.varIndex(a, axis, m, N - 1), -1.0 / dt0);
                a_trips.emplace_back(r_v, qp.varIndex(a, axis, m + 1, 1), -1.0 / dt1);
                a_trips.emplace_back(r_v, qp.varIndex(a, axis, m + 1, 0), 1.0 / dt1);

                const double s0 = 1.0 / (dt0 * dt0), s1 = 1.0 / (dt1 * dt1);
                const int r_a = addRow(0.0, 0.0);
                a_trips.emplace_back(r_a, qp.varIndex(a, axis, m, N), s0);
                a_trips.emplace_back(r_a, qp.varIndex(a, axis, m, N - 1), -2.0 * s0);
                a_trips.emplace_back(r_a, qp.varIndex(a, axis, m, N - 2), s0);
                a_trips.emplace_back(r_a, qp.varIndex(a, axis, m + 1, 2), -s1);
                a_trips.emplace_back(r_a, qp.varIndex(a, axis, m + 1, 1), 2.0 * s1);
                a_trips.emplace_back(r_a, qp.varIndex(a, axis, m + 1, 0), -s1);
            }
        }
    }
    qp.n_eq = row;

    // Corridor membership: per-axis bounds on every control point.
    for (int a = 0; a < qp.n_agents; ++a)
        for (int m = 0; m < M; ++m) {
            const Box3& box = corridors[a].corridors[tsegs.sfc_of_segment[a][m]].box;
            for (int axis = 0; axis < 3; ++axis)
                for (int k = 0; k < nc; ++k) {
                    const int r = addRow(box.lo[axis], box.hi[axis]);
                    a_trips.emplace_back(r, qp.varIndex(a, axis, m, k), 1.0);
                }
        }

    // Half-space membership of relative control points, one row per pair,
    // segment, and control index.
    for (const auto& seq : rsfcs) {
        const int p = pairIndex(qp.n_agents, seq.agent_a, seq.agent_b);
        for (int m = 0; m < M; ++m) {
            const HalfSpace& hs = seq.halfspaces[tsegs.rsfc_of_segment[p][m]];
            const int axis = axisOf(hs.dir);
            const double sign = signOf(hs.dir);
            for (int k = 0; k < nc; ++k) {
                const int r = addRow(hs.margin, kInf);
                a_trips.emplace_back(r, qp.varIndex(seq.agent_b, axis, m, k), sign);
                a_trips.emplace_back(r, qp.varIndex(seq.agent_a, axis, m, k), -sign);
            }
        }
    }

    qp.A.resize(row, qp.n_vars);
    qp.A.setFromTriplets(a_trips.begin(), a_trips.end());
    qp.l = Eigen::Map<Eigen::VectorXd>(lo.data(), row);
    qp.u = Eigen::Map<Eigen::VectorXd>(hi.data(), row);
    return qp;
}

std::vector<PiecewiseBernstein> extractTrajectories(const QpProblem& problem,
                                                    const Eigen::VectorXd& x) {
    std::vector<PiecewiseBernstein> out(problem.n_agents);
    for (int a = 0; a < problem.n_agents; ++a) {
        out[a].agent = a;
        out[a].pieces.resize(problem.n_segments);
        for (int m = 0; m < problem.n_segments; ++m) {
            BernsteinPiece& piece = out[a].pieces[m];
            piece.t0 = problem.knots[m];
            piece.t1 = problem.knots[m + 1];
            piece.controls.resize(3, problem.degree + 1);
            for (int axis = 0; axis < 3; ++axis)
                for (int k = 0; k <= problem.degree; ++k)
                    piece.controls(axis, k) = x[problem.varIndex(a, axis, m, k)];
        }
    }
    return out;
}

}  // namespace swarmplan
