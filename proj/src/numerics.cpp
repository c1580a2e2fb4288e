#include "twoseel/numerics.hpp"

#include <cmath>

namespace twoseel {

SymMatrix inv_sqrt(const SymMatrix& v) {
    const EigenSym e = jacobi_eigen(v);
    const int n = v.dim();
    const double lam_max = e.values[n - 1];
    if (!(lam_max > 0.0) || e.values[0] <= 1e-10 * lam_max)
        throw NotPositiveDefinite("inv_sqrt: eigenvalue floor violated (min " +
                                  std::to_string(e.values[0]) + ", max " +
                                  std::to_string(lam_max) + ")");
    Mat m(n, n);
    for (int k = 0; k < n; ++k) {
        const double w = 1.0 / std::sqrt(e.values[k]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) += w * e.vectors(i, k) * e.vectors(j, k);
    }
    // exact symmetrization of accumulated rounding
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double x = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = x;
            m(j, i) = x;
        }
    return SymMatrix(std::move(m));
}

namespace {

double gamma_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int k = 0; k < 1000; ++k) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("reg_lower_gamma: series failed to converge");
}

// Upper tail Q(a, x) by modified Lentz continued fraction.
double gamma_cf(double a, double x) {
    const double fpmin = std::numeric_limits<double>::min() / 1e-16;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= 1e-16)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw std::runtime_error("reg_lower_gamma: continued fraction failed to converge");
}

}  // namespace

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("reg_lower_gamma: need a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_cf(a, x);
}

double chisq_cdf(int df, double x) {
    if (df < 1) throw DomainError("chisq_cdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    return reg_lower_gamma(0.5 * df, 0.5 * x);
}

double chisq_quantile(int df, double prob) {
    if (df < 1) throw DomainError("chisq_quantile: df must be >= 1");
    if (!(prob > 0.0 && prob < 1.0))
        throw DomainError("chisq_quantile: prob must lie in (0, 1)");
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(df));
    int guard = 0;
    while (chisq_cdf(df, hi) < prob) {
        hi *= 2.0;
        if (++guard > 1200) throw std::runtime_error("chisq_quantile: bracketing failed");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double p = chisq_cdf(df, mid);
        if (std::fabs(p - prob) < 1e-12 || hi - lo < 1e-15 * std::max(1.0, hi)) return mid;
        if (p < prob)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

NewtonResult newton_solve(const ResidualFn& f, const JacobianFn& j, Vec x0,
                          const NewtonOptions& opts, const FeasiblePred& feasible) {
    NewtonResult res;
    if (feasible && !feasible(x0)) {
        res.x = std::move(x0);
        res.stall = NewtonStall::Boundary;
        return res;
    }
    Vec x = std::move(x0);
    Vec fx = f(x);
    if (!all_finite(fx)) throw NonFiniteEvaluation("newton_solve: residual non-finite at start");
    double rn = inf_norm(fx);
    const std::size_t dim = fx.size();

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        if (rn <= opts.tol) break;
        Mat jac = j(x);
        if (!jac.finite()) {
            if (iter == 0) throw NonFiniteEvaluation("newton_solve: Jacobian non-finite");
            res.stall = NewtonStall::Stagnation;  // stop at the last usable iterate
            break;
        }
        LuDecomposition lu(jac);
        if (lu.singular() || jac.norm_inf() * lu.inverse().norm_inf() > 1e12) {
            if (iter == 0)
                throw SingularJacobian("newton_solve: Jacobian condition estimate exceeds 1e12");
            res.stall = NewtonStall::Stagnation;
            break;
        }
        Vec rhs(dim);
        for (std::size_t i = 0; i < dim; ++i) rhs[i] = -fx[i];
        const Vec dx = lu.solve(rhs);

        double step = 1.0;
        bool accepted = false;
        int infeasible_trials = 0;
        int trials = 0;
        Vec xt(dim), ft;
        for (int k = 0; k <= opts.max_backtracks; ++k) {
            ++trials;
            for (std::size_t i = 0; i < dim; ++i) xt[i] = x[i] + step * dx[i];
            if (feasible && !feasible(xt)) {
                ++infeasible_trials;
                step *= 0.5;
                continue;
            }
            ft = f(xt);
            if (!all_finite(ft)) {
                if (!feasible)
                    throw NonFiniteEvaluation("newton_solve: residual non-finite at trial point");
                ++infeasible_trials;
                step *= 0.5;
                continue;
            }
            const double rt = inf_norm(ft);
            if (rt < rn * (1.0 - 1e-4 * step) || rt <= opts.tol) {
                x = xt;
                fx = std::move(ft);
                rn = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
            if (step < opts.min_step) break;
        }
        if (!accepted) {
            res.stall = (infeasible_trials == trials) ? NewtonStall::Boundary
                                                      : NewtonStall::Stagnation;
            break;
        }
        res.iters = iter + 1;
    }

    res.x = std::move(x);
    res.residual = rn;
    res.converged = rn <= opts.tol;
    if (res.converged) res.stall = NewtonStall::None;
    return res;
}

}  // namespace twoseel
