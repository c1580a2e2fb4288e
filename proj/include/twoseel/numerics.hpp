#pragma once

#include <functional>

#include "twoseel/linalg.hpp"

namespace twoseel {

struct NotPositiveDefinite : std::runtime_error {
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct SingularJacobian : std::runtime_error {
    explicit SingularJacobian(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteEvaluation : std::runtime_error {
    explicit NonFiniteEvaluation(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Symmetric inverse square root V^{-1/2} via Jacobi eigendecomposition.
// Rejects matrices whose smallest eigenvalue is <= 1e-10 times the largest.
SymMatrix inv_sqrt(const SymMatrix& v);

// Regularized lower incomplete gamma P(a, x): series expansion for
// x < a + 1, Lentz continued fraction for the complement otherwise.
double reg_lower_gamma(double a, double x);

double chisq_cdf(int df, double x);

// (prob)-quantile of the chi-square distribution with df degrees of freedom,
// found by bisection on the CDF.
double chisq_quantile(int df, double prob);

struct NewtonOptions {
    int max_iters = 80;
    double tol = 1e-10;       // convergence threshold on the residual inf-norm
    int max_backtracks = 30;  // step halvings per iteration
    double min_step = 1e-12;
};

// Why a solve did not converge; callers use this to tell a feasibility-bound
// stall (iterate pinned against the feasible-region boundary) from plain
// stagnation.
enum class NewtonStall { None, Boundary, Stagnation };

struct NewtonResult {
    Vec x;
    bool converged = false;
    int iters = 0;
    double residual = std::numeric_limits<double>::infinity();
    NewtonStall stall = NewtonStall::None;
};

using ResidualFn = std::function<Vec(const Vec&)>;
using JacobianFn = std::function<Mat(const Vec&)>;
using FeasiblePred = std::function<bool(const Vec&)>;

// Damped Newton for square nonlinear systems. Steps are halved until the
// trial point is feasible (when a predicate is supplied) and the residual
// inf-norm decreases. Throws SingularJacobian when the condition estimate
// exceeds 1e12 and NonFiniteEvaluation when F or J is non-finite at an
// accepted point.
NewtonResult newton_solve(const ResidualFn& f, const JacobianFn& j, Vec x0,
                          const NewtonOptions& opts = {},
                          const FeasiblePred& feasible = nullptr);

}  // namespace twoseel
