#include "swarmplan/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseCholesky>

#include "swarmplan/util.hpp"

namespace swarmplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRhoEqScale = 1e3;  // stiffer step on equality rows
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;

double infNorm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Modified Ruiz equilibration of the KKT block matrix plus cost scaling.
struct Scaling {
    Eigen::VectorXd d;  // variable scaling (n)
    Eigen::VectorXd e;  // constraint scaling (m)
    double c = 1.0;     // cost scaling
};

Scaling ruizEquilibrate(SparseMat& p, Eigen::VectorXd& q, SparseMat& a,
                        Eigen::VectorXd& l, Eigen::VectorXd& u, int iters) {
    const int n = static_cast<int>(p.rows());
    const int m = static_cast<int>(a.rows());
    Scaling s;
    s.d = Eigen::VectorXd::Ones(n);
    s.e = Eigen::VectorXd::Ones(m);

    Eigen::VectorXd delta(n), eps(m);
    for (int iter = 0; iter < iters; ++iter) {
        // Column norms of [P; A] for variables, row norms of A for constraints.
        Eigen::VectorXd col_norm = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd row_norm = Eigen::VectorXd::Zero(m);
        for (int k = 0; k < p.outerSize(); ++k)
            for (SparseMat::InnerIterator it(p, k); it; ++it)
                col_norm[it.col()] = std::max(col_norm[it.col()], std::abs(it.value()));
        for (int k = 0; k < a.outerSize(); ++k)
            for (SparseMat::InnerIterator it(a, k); it; ++it) {
                col_norm[it.col()] = std::max(col_norm[it.col()], std::abs(it.value()));
                row_norm[it.row()] = std::max(row_norm[it.row()], std::abs(it.value()));
            }
        for (int j = 0; j < n; ++j)
            delta[j] = col_norm[j] > 1e-12 ? 1.0 / std::sqrt(col_norm[j]) : 1.0;
        for (int i = 0; i < m; ++i)
            eps[i] = row_norm[i] > 1e-12 ? 1.0 / std::sqrt(row_norm[i]) : 1.0;

        p = delta.asDiagonal() * p * delta.asDiagonal();
        a = eps.asDiagonal() * a * delta.asDiagonal();
        q = delta.cwiseProduct(q);
        s.d = s.d.cwiseProduct(delta);
        s.e = s.e.cwiseProduct(eps);

        // Cost scaling toward unit magnitude.
        Eigen::VectorXd p_col = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < p.outerSize(); ++k)
            for (SparseMat::InnerIterator it(p, k); it; ++it)
                p_col[it.col()] = std::max(p_col[it.col()], std::abs(it.value()));
        const double mean_p = n > 0 ? p_col.mean() : 0.0;
        const double denom = std::max(mean_p, infNorm(q));
        const double gamma = denom > 1e-12 ? 1.0 / denom : 1.0;
        p *= gamma;
        q *= gamma;
        s.c *= gamma;
    }
    for (int i = 0; i < m; ++i) {
        if (std::isfinite(l[i])) l[i] *= s.e[i];
        if (std::isfinite(u[i])) u[i] *= s.e[i];
    }
    return s;
}

SparseMat buildKkt(const SparseMat& p, const SparseMat& a, double sigma,
                   const Eigen::VectorXd& rho) {
    const int n = static_cast<int>(p.rows());
    const int m = static_cast<int>(a.rows());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(p.nonZeros() + 2 * a.nonZeros() + n + m);
    for (int k = 0; k < p.outerSize(); ++k)
        for (SparseMat::InnerIterator it(p, k); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                               it.value());
    for (int j = 0; j < n; ++j) trips.emplace_back(j, j, sigma);
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMat::InnerIterator it(a, k); it; ++it) {
            trips.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()),
                               it.value());
            trips.emplace_back(static_cast<int>(it.col()), n + static_cast<int>(it.row()),
                               it.value());
        }
    for (int i = 0; i < m; ++i) trips.emplace_back(n + i, n + i, -1.0 / rho[i]);
    SparseMat kkt(n + m, n + m);
    kkt.setFromTriplets(trips.begin(), trips.end());
    return kkt;
}

}  // namespace

const char* qpStatusName(QpStatus s) {
    switch (s) {
        case QpStatus::Solved: return "solved";
        case QpStatus::PrimalInfeasible: return "primal_infeasible";
        case QpStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

QpSolution solveQp(const SparseMat& P, const Eigen::VectorXd& q, const SparseMat& A,
                   const Eigen::VectorXd& l, const Eigen::VectorXd& u,
                   const QpSettings& settings) {
    Timer timer;
    QpSolution sol;
    const int n = static_cast<int>(P.rows());
    const int m = static_cast<int>(A.rows());

    // Scaled working copies.
    SparseMat ps = P;
    SparseMat as = A;
    Eigen::VectorXd qs = q, ls = l, us = u;
    const Scaling sc = ruizEquilibrate(ps, qs, as, ls, us, settings.scaling_iters);

    if (m == 0) {
        // Unconstrained: a single regularized Newton solve.
        SparseMat reg = ps;
        for (int j = 0; j < n; ++j) reg.coeffRef(j, j) += settings.sigma;
        Eigen::SimplicialLDLT<SparseMat> ldlt(reg);
        const Eigen::VectorXd xs = ldlt.solve(-qs);
        sol.x = sc.d.cwiseProduct(xs);
        sol.y.resize(0);
        sol.z.resize(0);
        sol.status = QpStatus::Solved;
        sol.dual_res = infNorm(P * sol.x + q);
        sol.objective = 0.5 * sol.x.dot(P * sol.x) + q.dot(sol.x);
        sol.solve_seconds = timer.seconds();
        return sol;
    }

    std::vector<char> is_eq(m);
    for (int i = 0; i < m; ++i) is_eq[i] = std::isfinite(ls[i]) && ls[i] == us[i];

    double rho_bar = settings.rho0;
    Eigen::VectorXd rho(m), rho_inv(m);
    auto setRho = [&](double value) {
        rho_bar = std::clamp(value, kRhoMin, kRhoMax);
        for (int i = 0; i < m; ++i) {
            rho[i] = is_eq[i] ? kRhoEqScale * rho_bar : rho_bar;
            rho_inv[i] = 1.0 / rho[i];
        }
    };
    setRho(settings.rho0);

    Eigen::SimplicialLDLT<SparseMat> ldlt;
    ldlt.compute(buildKkt(ps, as, settings.sigma, rho));
    if (ldlt.info() != Eigen::Success) {
        sol.status = QpStatus::MaxIterations;
        sol.solve_seconds = timer.seconds();
        return sol;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) z[i] = std::clamp(0.0, ls[i], us[i]);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    Eigen::VectorXd rhs(n + m), xz(n + m), xt(n), zt(m), z_prev(m), dy(m);

    auto unscaledResiduals = [&](double& rp, double& rd) {
        const Eigen::VectorXd xu = sc.d.cwiseProduct(x);
        const Eigen::VectorXd zu = z.cwiseQuotient(sc.e);
        const Eigen::VectorXd yu = sc.e.cwiseProduct(y) / sc.c;
        rp = infNorm(A * xu - zu);
        rd = infNorm(P * xu + q + A.transpose() * yu);
    };

    const double alpha = settings.alpha;
    int iter = 0;
    for (iter = 1; iter <= settings.max_iter; ++iter) {
        rhs.head(n) = settings.sigma * x - qs;
        rhs.tail(m) = z - rho_inv.cwiseProduct(y);
        xz = ldlt.solve(rhs);
        xt = xz.head(n);
        const Eigen::VectorXd nu = xz.tail(m);
        zt = z + rho_inv.cwiseProduct(nu - y);

        x = alpha * xt + (1.0 - alpha) * x;
        z_prev = z;
        const Eigen::VectorXd z_relaxed = alpha * zt + (1.0 - alpha) * z_prev;
        const Eigen::VectorXd z_pre = z_relaxed + rho_inv.cwiseProduct(y);
        for (int i = 0; i < m; ++i) z[i] = std::clamp(z_pre[i], ls[i], us[i]);
        dy = rho.cwiseProduct(z_relaxed - z);
        y += dy;

        if (iter % settings.check_every != 0 && iter != settings.max_iter) continue;

        double rp, rd;
        unscaledResiduals(rp, rd);

        const Eigen::VectorXd xu = sc.d.cwiseProduct(x);
        const Eigen::VectorXd zu = z.cwiseQuotient(sc.e);
        const Eigen::VectorXd yu = sc.e.cwiseProduct(y) / sc.c;
        const double eps_prim =
            settings.eps_abs +
            settings.eps_rel * std::max(infNorm(A * xu), infNorm(zu));
        const double eps_dual =
            settings.eps_abs +
            settings.eps_rel * std::max({infNorm(P * xu), infNorm(A.transpose() * yu), infNorm(q)});

        if (rp <= eps_prim && rd <= eps_dual) {
            sol.status = QpStatus::Solved;
            sol.iterations = iter;
            break;
        }

        // Primal infeasibility certificate from the dual update direction.
        const Eigen::VectorXd dyu = sc.e.cwiseProduct(dy) / sc.c;
        const double dy_norm = infNorm(dyu);
        if (dy_norm > 1e-14) {
            const double eps = settings.eps_prim_inf * dy_norm;
            bool cert = infNorm(A.transpose() * dyu) <= eps;
            double support = 0.0;
            for (int i = 0; i < m && cert; ++i) {
                const double v = dyu[i];
                if (v > eps) {
                    if (!std::isfinite(u[i])) cert = false;
                    else support += u[i] * v;
                } else if (v < -eps) {
                    if (!std::isfinite(l[i])) cert = false;
                    else support += l[i] * v;
                }
            }
            if (cert && support <= -eps) {
                sol.status = QpStatus::PrimalInfeasible;
                sol.iterations = iter;
                sol.x = sc.d.cwiseProduct(x);
                sol.y = dyu;
                sol.prim_res = rp;
                sol.dual_res = rd;
                sol.solve_seconds = timer.seconds();
                return sol;
            }
        }

        if (settings.adaptive_rho && iter != settings.max_iter) {
            const double prim_scale = std::max({infNorm(A * xu), infNorm(zu), 1e-12});
            const double dual_scale =
                std::max({infNorm(P * xu), infNorm(A.transpose() * yu), infNorm(q), 1e-12});
            const double ratio = (rp / prim_scale) / std::max(rd / dual_scale, 1e-12);
            const double rho_new = std::clamp(rho_bar * std::sqrt(ratio), kRhoMin, kRhoMax);
            if (rho_new > 5.0 * rho_bar || rho_new < 0.2 * rho_bar) {
                setRho(rho_new);
                ldlt.compute(buildKkt(ps, as, settings.sigma, rho));
            }
        }
    }

    if (sol.status != QpStatus::Solved) {
        sol.status = QpStatus::MaxIterations;
        sol.iterations = settings.max_iter;
    }

    // Unscale.
    sol.x = sc.d.cwiseProduct(x);
    sol.y = sc.e.cwiseProduct(y) / sc.c;
    sol.z = z.cwiseQuotient(sc.e);
    unscaledResiduals(sol.prim_res, sol.dual_res);

    // Active-set polish on the original data.
    if (sol.status == QpStatus::Solved && settings.polish) {
        std::vector<int> active;
        std::vector<double> target;
        for (int i = 0; i < m; ++i) {
            if (is_eq[i]) {
                active.push_back(i);
                target.push_back(l[i]);
            } else if (sol.y[i] < 0.0 && std::isfinite(l[i])) {
                active.push_back(i);
                target.push_back(l[i]);
            } else if (sol.y[i] > 0.0 && std::isfinite(u[i])) {
                active.push_back(i);
                target.push_back(u[i]);
            }
        }
        const int ma = static_cast<int>(active.size());
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < P.outerSize(); ++k)
            for (SparseMat::InnerIterator it(P, k); it; ++it)
                trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                   it.value());
        const double delta = 1e-9;
        for (int j = 0; j < n; ++j) trips.emplace_back(j, j, delta);
        // Gather active rows of A via a column pass.
        std::vector<int> row_map(m, -1);
        for (int r = 0; r < ma; ++r) row_map[active[r]] = r;
        for (int k = 0; k < A.outerSize(); ++k)
            for (SparseMat::InnerIterator it(A, k); it; ++it) {
                const int r = row_map[it.row()];
                if (r < 0) continue;
                trips.emplace_back(n + r, static_cast<int>(it.col()), it.value());
                trips.emplace_back(static_cast<int>(it.col()), n + r, it.value());
            }
        for (int r = 0; r < ma; ++r) trips.emplace_back(n + r, n + r, -delta);
        SparseMat kkt_pol(n + ma, n + ma);
        kkt_pol.setFromTriplets(trips.begin(), trips.end());

        Eigen::SimplicialLDLT<SparseMat> pol(kkt_pol);
        if (pol.info() == Eigen::Success) {
            Eigen::VectorXd rhs_pol(n + ma), s_vec = Eigen::VectorXd::Zero(n + ma);
            rhs_pol.head(n) = -q;
            for (int r = 0; r < ma; ++r) rhs_pol[n + r] = target[r];

            // Iterative refinement against the unregularized KKT system.
            auto applyKkt = [&](const Eigen::VectorXd& v) {
                Eigen::VectorXd out(n + ma);
                Eigen::VectorXd gv = Eigen::VectorXd::Zero(ma);
                Eigen::VectorXd gtnu = Eigen::VectorXd::Zero(n);
                const Eigen::VectorXd xv = v.head(n);
                const Eigen::VectorXd nuv = v.tail(ma);
                for (int k = 0; k < A.outerSize(); ++k)
                    for (SparseMat::InnerIterator it(A, k); it; ++it) {
                        const int r = row_map[it.row()];
                        if (r < 0) continue;
                        gv[r] += it.value() * xv[it.col()];
                        gtnu[it.col()] += it.value() * nuv[r];
                    }
                out.head(n) = P * xv + gtnu;
                out.tail(ma) = gv;
                return out;
            };
            for (int ref = 0; ref < 3; ++ref) {
                const Eigen::VectorXd resid = rhs_pol - applyKkt(s_vec);
                s_vec += pol.solve(resid);
            }

            Eigen::VectorXd x_pol = s_vec.head(n);
            Eigen::VectorXd y_pol = Eigen::VectorXd::Zero(m);
            for (int r = 0; r < ma; ++r) y_pol[active[r]] = s_vec[n + r];

            const Eigen::VectorXd ax = A * x_pol;
            Eigen::VectorXd z_pol(m);
            for (int i = 0; i < m; ++i) z_pol[i] = std::clamp(ax[i], l[i], u[i]);
            double rp_pol = infNorm(ax - z_pol);
            double rd_pol = infNorm(P * x_pol + q + A.transpose() * y_pol);
            // Dual feasibility of the polished multipliers.
            bool dual_ok = true;
            for (int i = 0; i < m && dual_ok; ++i) {
                if (is_eq[i]) continue;
                if (y_pol[i] > 0.0 && !std::isfinite(u[i])) dual_ok = false;
                if (y_pol[i] < 0.0 && !std::isfinite(l[i])) dual_ok = false;
            }
            if (dual_ok && std::max(rp_pol, rd_pol) <= std::max(sol.prim_res, sol.dual_res)) {
                sol.x = x_pol;
                sol.y = y_pol;
                sol.z = z_pol;
                sol.prim_res = rp_pol;
                sol.dual_res = rd_pol;
                sol.polished = true;
            }
        }
    }

    sol.objective = 0.5 * sol.x.dot(P * sol.x) + q.dot(sol.x);
    sol.solve_seconds = timer.seconds();
    return sol;
}

}  // namespace swarmplan
