#include "swarmplan/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swarmplan {

using nlohmann::json;

TrajectoryBundle timeScale(const TrajectoryBundle& bundle, double v_max, double a_max,
                           double sample_dt) {
    double v_peak = 0.0, a_peak = 0.0;
    const double total = bundle.totalTime();
    const int steps = static_cast<int>(std::floor(total / sample_dt));
    for (const auto& traj : bundle.trajs) {
        for (int k = 0; k <= steps; ++k) {
            const double t = std::min(k * sample_dt, total);
            v_peak = std::max(v_peak, traj.evalDeriv(t, 1).norm());
            a_peak = std::max(a_peak, traj.evalDeriv(t, 2).norm());
        }
    }
    const double s =
        std::max({1.0, v_peak / v_max, std::sqrt(a_peak / a_max)});

    TrajectoryBundle out = bundle;
    out.scale = bundle.scale * s;
    for (auto& k : out.knots) k *= s;
    for (auto& traj : out.trajs)
        for (auto& piece : traj.pieces) {
            piece.t0 *= s;
            piece.t1 *= s;
        }
    return out;
}

VerifyReport verifyBundle(const TrajectoryBundle& bundle, const VoxelMap& map,
                          const std::vector<AgentSpec>& agents, const PlannerConfig& config) {
    VerifyReport report;
    const int n = static_cast<int>(bundle.trajs.size());
    const double total = bundle.totalTime();
    const double dt = config.sample_dt;
    const int steps = static_cast<int>(std::floor(total / dt));

    auto addViolation = [&](VerifyViolation v) {
        report.pass = false;
        report.violations.push_back(std::move(v));
    };

    // (a) obstacle clearance and sampled dynamics extrema
    for (int a = 0; a < n; ++a) {
        const double r = agents[a].radius;
        bool reported = false;
        for (int k = 0; k <= steps && !reported; ++k) {
            const double t = std::min(k * dt, total);
            const Vec3 p = bundle.trajs[a].eval(t);
            report.max_speed = std::max(report.max_speed, bundle.trajs[a].evalDeriv(t, 1).norm());
            report.max_acc = std::max(report.max_acc, bundle.trajs[a].evalDeriv(t, 2).norm());

            Vec3i clo, chi;
            map.cellRange(Box3{p, p}.inflated(r), clo, chi);
            for (int z = clo.z(); z <= chi.z() && !reported; ++z)
                for (int y = clo.y(); y <= chi.y() && !reported; ++y)
                    for (int x = clo.x(); x <= chi.x() && !reported; ++x) {
                        const Vec3i c(x, y, z);
                        if (!map.occupied(c)) continue;
                        if (map.cellBox(c).inflated(r - kGeomEps).containsInterior(p)) {
                            std::ostringstream os;
                            os << "agent " << agents[a].id << " within " << r
                               << " m of an obstacle";
                            addViolation({VerifyViolation::Kind::Obstacle, t, a, -1, os.str()});
                            reported = true;
                        }
                    }
        }
    }

    // (b) pairwise separation against the inter-collision box
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double lateral = agents[a].radius + agents[b].radius;
            const Vec3 half(lateral, lateral, config.downwash * lateral);
            for (int k = 0; k <= steps; ++k) {
                const double t = std::min(k * dt, total);
                const Vec3 rel = bundle.trajs[b].eval(t) - bundle.trajs[a].eval(t);
                if ((rel.array().abs() < half.array() - kGeomEps).all()) {
                    std::ostringstream os;
                    os << "agents " << agents[a].id << "," << agents[b].id
                       << " inside the inter-collision box";
                    addViolation({VerifyViolation::Kind::InterAgent, t, a, b, os.str()});
                    break;
                }
            }
        }

    // (c) continuity at interior knots
    for (int a = 0; a < n; ++a) {
        const auto& pieces = bundle.trajs[a].pieces;
        for (std::size_t m = 0; m + 1 < pieces.size(); ++m) {
            const double t = pieces[m].t1;
            for (int d = 0; d <= 2; ++d) {
                const double jump = (pieces[m].evalDeriv(t, d) - pieces[m + 1].evalDeriv(t, d))
                                        .cwiseAbs()
                                        .maxCoeff();
                report.max_knot_jump = std::max(report.max_knot_jump, jump);
                if (jump > kContinuityTol) {
                    std::ostringstream os;
                    os << "agent " << agents[a].id << " order-" << d << " jump " << jump
                       << " at knot " << m + 1;
                    addViolation({VerifyViolation::Kind::Continuity, t, a, -1, os.str()});
                }
            }
        }
    }

    // (d) endpoint attainment with rest boundary conditions
    for (int a = 0; a < n; ++a) {
        const auto& traj = bundle.trajs[a];
        const double t0 = traj.startTime(), t1 = traj.endTime();
        struct Check {
            double err;
            const char* what;
        };
        const Check checks[] = {
            {(traj.eval(t0) - agents[a].start).norm(), "start position"},
            {(traj.eval(t1) - agents[a].goal).norm(), "goal position"},
            {traj.evalDeriv(t0, 1).norm(), "start velocity"},
            {traj.evalDeriv(t1, 1).norm(), "goal velocity"},
            {traj.evalDeriv(t0, 2).norm(), "start acceleration"},
            {traj.evalDeriv(t1, 2).norm(), "goal acceleration"},
        };
        for (const auto& c : checks) {
            if (c.err > kContinuityTol) {
                std::ostringstream os;
                os << "agent " << agents[a].id << " " << c.what << " off by " << c.err;
                addViolation({VerifyViolation::Kind::Endpoint,
                              std::string(c.what).find("start") != std::string::npos ? t0 : t1,
                              a, -1, os.str()});
            }
        }
    }

    std::stable_sort(report.violations.begin(), report.violations.end(),
                     [](const VerifyViolation& a, const VerifyViolation& b) {
                         if (a.t != b.t) return a.t < b.t;
                         if (a.agent_a != b.agent_a) return a.agent_a < b.agent_a;
                         return a.agent_b < b.agent_b;
                     });
    return report;
}

void writeTrajectoryCsv(const std::string& path, const TrajectoryBundle& bundle,
                        double sample_dt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,agent_id,x,y,z,vx,vy,vz,ax,ay,az\n";
    const double total = bundle.totalTime();
    const int steps = static_cast<int>(std::floor(total / sample_dt));
    char line[512];
    for (int k = 0; k <= steps; ++k) {
        const double t = k * sample_dt;
        for (const auto& traj : bundle.trajs) {
            const Vec3 p = traj.eval(t);
            const Vec3 v = traj.evalDeriv(t, 1);
            const Vec3 acc = traj.evalDeriv(t, 2);
            std::snprintf(line, sizeof(line),
                          "%.6f,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", t,
                          traj.agent, p.x(), p.y(), p.z(), v.x(), v.y(), v.z(), acc.x(),
                          acc.y(), acc.z());
            out << line;
        }
    }
}

namespace {

json vec3Json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3FromJson(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

void writePlanJson(const std::string& path, const TrajectoryBundle& bundle,
                   const std::vector<AgentSpec>& agents, const PlannerConfig& config,
                   const SolverStats& stats) {
    json j;
    json ja = json::array();
    for (const auto& a : agents)
        ja.push_back({{"id", a.id},
                      {"radius", a.radius},
                      {"start", vec3Json(a.start)},
                      {"goal", vec3Json(a.goal)}});
    j["agents"] = ja;
    j["config"] = {{"downwash", config.downwash}, {"degree", config.degree},
                   {"deriv_order", config.deriv_order}, {"sample_dt", config.sample_dt},
                   {"v_max", config.v_max}, {"a_max", config.a_max}};
    j["knots"] = bundle.knots;
    j["scale"] = bundle.scale;
    j["solver"] = {{"status", stats.status},       {"iterations", stats.iterations},
                   {"prim_res", stats.prim_res},   {"dual_res", stats.dual_res},
                   {"solve_seconds", stats.solve_seconds}, {"polished", stats.polished},
                   {"cost", stats.cost}};
    json jt = json::array();
    for (const auto& traj : bundle.trajs) {
        json segs = json::array();
        for (const auto& piece : traj.pieces) {
            json controls = json::array();
            for (int k = 0; k < piece.controls.cols(); ++k)
                controls.push_back(vec3Json(piece.controls.col(k)));
            segs.push_back({{"controls", controls}});
        }
        jt.push_back({{"agent", traj.agent}, {"segments", segs}});
    }
    j["trajectories"] = jt;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

PlanFile readPlanJson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ScenarioError("parse error in " + path + ": " + e.what());
    }

    PlanFile plan;
    try {
        for (const auto& ja : j.at("agents")) {
            AgentSpec a;
            a.id = ja.at("id").get<int>();
            a.radius = ja.at("radius").get<double>();
            a.start = vec3FromJson(ja.at("start"));
            a.goal = vec3FromJson(ja.at("goal"));
            plan.agents.push_back(a);
        }
        const json& jc = j.at("config");
        plan.config.downwash = jc.at("downwash").get<double>();
        plan.config.degree = jc.at("degree").get<int>();
        plan.config.deriv_order = jc.at("deriv_order").get<int>();
        plan.config.sample_dt = jc.at("sample_dt").get<double>();
        plan.config.v_max = jc.at("v_max").get<double>();
        plan.config.a_max = jc.at("a_max").get<double>();

        plan.bundle.knots = j.at("knots").get<std::vector<double>>();
        plan.bundle.scale = j.at("scale").get<double>();
        const json& js = j.at("solver");
        plan.stats.status = js.at("status").get<std::string>();
        plan.stats.iterations = js.at("iterations").get<int>();
        plan.stats.prim_res = js.at("prim_res").get<double>();
        plan.stats.dual_res = js.at("dual_res").get<double>();
        plan.stats.solve_seconds = js.at("solve_seconds").get<double>();
        plan.stats.polished = js.at("polished").get<bool>();
        plan.stats.cost = js.at("cost").get<double>();

        for (const auto& jt : j.at("trajectories")) {
            PiecewiseBernstein traj;
            traj.agent = jt.at("agent").get<int>();
            int m = 0;
            for (const auto& seg : jt.at("segments")) {
                BernsteinPiece piece;
                piece.t0 = plan.bundle.knots.at(m);
                piece.t1 = plan.bundle.knots.at(m + 1);
                const auto& controls = seg.at("controls");
                piece.controls.resize(3, static_cast<int>(controls.size()));
                for (int k = 0; k < static_cast<int>(controls.size()); ++k)
                    piece.controls.col(k) = vec3FromJson(controls.at(k));
                traj.pieces.push_back(std::move(piece));
                ++m;
            }
            plan.bundle.trajs.push_back(std::move(traj));
        }
    } catch (const json::exception& e) {
        throw ScenarioError("malformed plan file " + path + ": " + e.what());
    }
    return plan;
}

}  // namespace swarmplan
