#include "swarmplan/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmplan {

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;  // exact at every step
    }
    return result;
}

double bernsteinBasis(int k, int N, double t) {
    if (k < 0 || k > N) throw std::invalid_argument("bernsteinBasis: k out of range");
    return static_cast<double>(binomial(N, k)) * std::pow(t, k) * std::pow(1.0 - t, N - k);
}

Vec3 BernsteinPiece::eval(double t) const {
    const double dt = duration();
    double tau = dt > 0.0 ? (t - t0) / dt : 0.0;
    tau = std::clamp(tau, 0.0, 1.0);
    // de Casteljau
    Eigen::Matrix3Xd work = controls;
    for (int level = degree(); level >= 1; --level)
        for (int k = 0; k < level; ++k)
            work.col(k) = (1.0 - tau) * work.col(k) + tau * work.col(k + 1);
    return work.col(0);
}

BernsteinPiece BernsteinPiece::derivative(int d) const {
    BernsteinPiece out = *this;
    for (int rep = 0; rep < d; ++rep) {
        const int n = out.degree();
        if (n == 0) {
            out.controls = Eigen::Matrix3Xd::Zero(3, 1);
            continue;
        }
        Eigen::Matrix3Xd next(3, n);
        const double scale = n / out.duration();
        for (int k = 0; k < n; ++k)
            next.col(k) = scale * (out.controls.col(k + 1) - out.controls.col(k));
        out.controls = next;
    }
    return out;
}

Vec3 BernsteinPiece::evalDeriv(double t, int d) const {
    if (d == 0) return eval(t);
    if (d > degree()) return Vec3::Zero();
    return derivative(d).eval(t);
}

Eigen::MatrixXd derivControlMatrix(int N, int d, double dt) {
    if (d < 0 || d > N) throw std::invalid_argument("derivControlMatrix: bad order");
    Eigen::MatrixXd map = Eigen::MatrixXd::Identity(N + 1, N + 1);
    int n = N;
    for (int rep = 0; rep < d; ++rep) {
        Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(n, n + 1);
        for (int k = 0; k < n; ++k) {
            diff(k, k) = -n / dt;
            diff(k, k + 1) = n / dt;
        }
        map = (diff * map).eval();
        --n;
    }
    return map;
}

Eigen::MatrixXd bernsteinGram(int N) {
    Eigen::MatrixXd g(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            g(i, j) = static_cast<double>(binomial(N, i)) * static_cast<double>(binomial(N, j)) /
                      (static_cast<double>(binomial(2 * N, i + j)) * (2 * N + 1));
    return g;
}

Eigen::MatrixXd derivCostBlock(double dt, int N, int order) {
    if (dt <= 0.0) throw std::invalid_argument("derivCostBlock: interval must be positive");
    if (order > N) throw std::invalid_argument("derivCostBlock: order exceeds degree");
    const Eigen::MatrixXd d = derivControlMatrix(N, order, dt);
    const Eigen::MatrixXd g = bernsteinGram(N - order);
    // integral over [t0,t1] = dt * integral over the unit parameter
    Eigen::MatrixXd q = dt * d.transpose() * g * d;
    return 0.5 * (q + q.transpose());  // symmetrize against rounding
}

BernsteinPiece relativePiece(const BernsteinPiece& a, const BernsteinPiece& b) {
    if (a.degree() != b.degree()) throw std::invalid_argument("relativePiece: degree mismatch");
    if (a.t0 != b.t0 || a.t1 != b.t1)
        throw std::invalid_argument("relativePiece: interval mismatch");
    BernsteinPiece out = a;
    out.controls = b.controls - a.controls;
    return out;
}

int PiecewiseBernstein::pieceIndex(double t) const {
    const int m = static_cast<int>(pieces.size());
    for (int i = 0; i < m; ++i)
        if (t <= pieces[i].t1 || i == m - 1) return i;
    return m - 1;
}

Vec3 PiecewiseBernstein::eval(double t) const { return pieces[pieceIndex(t)].eval(t); }

Vec3 PiecewiseBernstein::evalDeriv(double t, int d) const {
    return pieces[pieceIndex(t)].evalDeriv(t, d);
}

}  // namespace swarmplan
