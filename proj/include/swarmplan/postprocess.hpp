#pragma once

#include <string>
#include <vector>

#include "swarmplan/bernstein.hpp"
#include "swarmplan/qp_solver.hpp"
#include "swarmplan/scenario.hpp"
#include "swarmplan/voxel_map.hpp"

namespace swarmplan {

// Knot-jump and endpoint tolerance (absolute, SI units).
constexpr double kContinuityTol = 1e-6;

struct TrajectoryBundle {
    std::vector<PiecewiseBernstein> trajs;
    std::vector<double> knots;
    double scale = 1.0;

    double totalTime() const { return knots.empty() ? 0.0 : knots.back(); }
};

// Uniform time dilation s = max(1, V/v_max, sqrt(A/a_max)) with V, A the
// sampled maxima of speed and acceleration. The geometric path is unchanged;
// velocities scale by 1/s and accelerations by 1/s^2.
TrajectoryBundle timeScale(const TrajectoryBundle& bundle, double v_max, double a_max,
                           double sample_dt);

struct VerifyViolation {
    enum class Kind { Obstacle, InterAgent, Continuity, Endpoint };
    Kind kind;
    double t = 0.0;
    int agent_a = -1;
    int agent_b = -1;
    std::string detail;
};

struct VerifyReport {
    bool pass = true;
    std::vector<VerifyViolation> violations;
    double max_speed = 0.0;
    double max_acc = 0.0;
    double max_knot_jump = 0.0;  // worst pos/vel/acc discontinuity seen
};

// Independent safety oracle. Samples every trajectory at sample_dt and checks
// obstacle clearance >= r^i, pairwise relative positions outside the
// (r^i+r^j, r^i+r^j, c_dw(r^i+r^j)) half-extent box, continuity at knots, and
// endpoint attainment. Evaluates polynomials directly; never consults
// corridors or QP data.
VerifyReport verifyBundle(const TrajectoryBundle& bundle, const VoxelMap& map,
                          const std::vector<AgentSpec>& agents, const PlannerConfig& config);

struct SolverStats {
    std::string status = "solved";
    int iterations = 0;
    double prim_res = 0.0;
    double dual_res = 0.0;
    double solve_seconds = 0.0;
    bool polished = false;
    double cost = 0.0;
};

void writeTrajectoryCsv(const std::string& path, const TrajectoryBundle& bundle,
                        double sample_dt);

void writePlanJson(const std::string& path, const TrajectoryBundle& bundle,
                   const std::vector<AgentSpec>& agents, const PlannerConfig& config,
                   const SolverStats& stats);

struct PlanFile {
    TrajectoryBundle bundle;
    std::vector<AgentSpec> agents;
    PlannerConfig config;
    SolverStats stats;
};

PlanFile readPlanJson(const std::string& path);

}  // namespace swarmplan
