#pragma once

#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace swarmplan {

using SparseMat = Eigen::SparseMatrix<double>;

// Convex QP in the form
//   minimize    0.5 x'Px + q'x
//   subject to  l <= Ax <= u
// solved by operator splitting (ADMM) with Ruiz preconditioning, adaptive
// step size, primal-infeasibility detection, and an active-set polish.
struct QpSettings {
    double eps_abs = 1e-6;
    double eps_rel = 1e-6;
    double eps_prim_inf = 1e-5;
    int max_iter = 20000;
    double sigma = 1e-6;
    double alpha = 1.6;   // over-relaxation
    double rho0 = 0.1;
    int check_every = 25;
    bool adaptive_rho = true;
    bool polish = true;
    int scaling_iters = 10;
};

enum class QpStatus { Solved, PrimalInfeasible, MaxIterations };

struct QpSolution {
    QpStatus status = QpStatus::MaxIterations;
    Eigen::VectorXd x;
    Eigen::VectorXd y;  // dual for l <= Ax <= u (positive part pushes on u)
    Eigen::VectorXd z;  // projected Ax
    int iterations = 0;
    double prim_res = 0.0;
    double dual_res = 0.0;
    double objective = 0.0;
    bool polished = false;
    double solve_seconds = 0.0;
};

QpSolution solveQp(const SparseMat& P, const Eigen::VectorXd& q, const SparseMat& A,
                   const Eigen::VectorXd& l, const Eigen::VectorXd& u,
                   const QpSettings& settings = {});

const char* qpStatusName(QpStatus s);

}  // namespace swarmplan
