#pragma once

#include <vector>

#include <Eigen/Dense>

#include "swarmplan/geometry.hpp"

namespace swarmplan {

// Exact binomial coefficient in integer arithmetic (n <= 61 stays in range).
long long binomial(int n, int k);

// Bernstein basis B_{k,N}(t) = C(N,k) t^k (1-t)^(N-k) on [0,1].
// Throws std::invalid_argument when k is outside [0, N].
double bernsteinBasis(int k, int N, double t);

// One polynomial segment in the Bernstein basis over [t0, t1].
// controls is 3 x (N+1): column k holds control point c_k.
struct BernsteinPiece {
    Eigen::Matrix3Xd controls;
    double t0 = 0.0;
    double t1 = 1.0;

    int degree() const { return static_cast<int>(controls.cols()) - 1; }
    double duration() const { return t1 - t0; }

    // Position at global time t (clamped local parameter, de Casteljau).
    Vec3 eval(double t) const;
    // d-th time derivative at global time t.
    Vec3 evalDeriv(double t, int d) const;
    // Hodograph: the d-th derivative as a Bernstein piece of degree N-d.
    BernsteinPiece derivative(int d = 1) const;
};

// Control points of the d-th derivative as a linear map of the original
// controls: rows (N+1-d), cols (N+1). Includes the 1/dt^d time scaling.
Eigen::MatrixXd derivControlMatrix(int N, int d, double dt);

// Gram matrix of the degree-N basis on [0,1]:
// G(i,j) = integral of B_{i,N} B_{j,N} over [0,1].
Eigen::MatrixXd bernsteinGram(int N);

// (N+1)x(N+1) symmetric PSD block Q with c^T Q c = integral over the piece of
// the squared `order`-th time derivative, per axis. Scales as dt^(1-2*order).
Eigen::MatrixXd derivCostBlock(double dt, int N, int order);

inline Eigen::MatrixXd jerkCostBlock(double dt, int N) { return derivCostBlock(dt, N, 3); }

// Pointwise difference b - a. Requires identical degree and interval.
BernsteinPiece relativePiece(const BernsteinPiece& a, const BernsteinPiece& b);

// M pieces over a shared strictly increasing knot vector.
struct PiecewiseBernstein {
    int agent = 0;
    std::vector<BernsteinPiece> pieces;

    double startTime() const { return pieces.front().t0; }
    double endTime() const { return pieces.back().t1; }
    int pieceIndex(double t) const;
    Vec3 eval(double t) const;
    Vec3 evalDeriv(double t, int d) const;
};

}  // namespace swarmplan
