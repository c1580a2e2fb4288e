#include "twoseel/oel.hpp"

#include <cmath>

namespace twoseel {

const char* to_string(DomainStatus s) {
    switch (s) {
        case DomainStatus::Interior: return "interior";
        case DomainStatus::Exterior: return "exterior";
        case DomainStatus::MaxIters: return "max_iters";
    }
    return "?";
}

Vec mele(const EstimatingFunction& ef, const Mat& sample) {
    const int k = sample.rows();
    if (k <= ef.q)
        throw InsufficientData("mele: need more than q observations");
    if (ef.p != ef.q)
        throw std::invalid_argument("mele: only just-determined systems (p == q) supported");

    const auto residual = [&](const Vec& theta) {
        Vec acc(ef.q, 0.0), g(ef.q);
        for (int i = 0; i < k; ++i) {
            ef.eval(sample.row(i), theta, g);
            for (int t = 0; t < ef.q; ++t) acc[t] += g[t];
        }
        for (double& v : acc) v /= k;
        return acc;
    };
    const auto jacobian = [&](const Vec& theta) {
        Mat acc(ef.q, ef.p), gj(ef.q, ef.p);
        for (int i = 0; i < k; ++i) {
            ef.jac(sample.row(i), theta, gj);
            for (int t = 0; t < ef.q; ++t)
                for (int u = 0; u < ef.p; ++u) acc(t, u) += gj(t, u);
        }
        for (int t = 0; t < ef.q; ++t)
            for (int u = 0; u < ef.p; ++u) acc(t, u) /= k;
        return acc;
    };

    // default start plus three restarts
    Vec colmean(ef.p, 0.0);
    for (int i = 0; i < k; ++i)
        for (int u = 0; u < std::min(ef.p, ef.d); ++u) colmean[u] += sample(i, u) / k;
    std::vector<Vec> starts;
    starts.push_back(Vec(ef.p, 0.0));
    starts.push_back(std::move(colmean));
    starts.push_back(Vec(ef.p, 0.5));
    starts.push_back(Vec(ef.p, -0.5));

    NewtonOptions opts;
    opts.tol = 1e-11;
    opts.max_iters = 100;
    for (const Vec& s : starts) {
        try {
            NewtonResult r = newton_solve(residual, jacobian, s, opts);
            if (r.converged && inf_norm(residual(r.x)) < 1e-9) return r.x;
        } catch (const std::exception&) {
            // try next start
        }
    }
    throw NoSolution("mele: Newton failed from the default start and 3 restarts");
}

Profiler::Profiler(EstimatingFunction ef, TwoSampleData data)
    : ef_(std::move(ef)), data_(std::move(data)) {
    theta_x_tilde_ = mele(ef_, data_.x());
    theta_y_tilde_ = mele(ef_, data_.y());
    pi_tilde_.resize(ef_.p);
    for (int i = 0; i < ef_.p; ++i) pi_tilde_[i] = theta_y_tilde_[i] - theta_x_tilde_[i];
}

ProfileSolution Profiler::trivial_solution() const {
    ProfileSolution s;
    s.lambda.assign(ef_.q, 0.0);
    s.theta_y = theta_y_tilde_;
    s.theta_x = theta_x_tilde_;
    s.loglik = 0.0;
    s.weights_x.assign(data_.m(), 1.0 / data_.m());
    s.weights_y.assign(data_.n(), 1.0 / data_.n());
    s.status = DomainStatus::Interior;
    s.iters = 0;
    s.pi = pi_tilde_;
    return s;
}

Profiler::Attempt Profiler::try_solve(const Vec& pi, const ProfileSolution* warm) const {
    const int q = ef_.q, p = ef_.p;
    const int m = data_.m(), n = data_.n();
    const double fm = data_.fm(), fn = data_.fn();
    const double floor_arg = 1.0 / data_.total();

    // unknowns u = (lambda, theta_y); theta_x = theta_y - pi
    const auto split = [&](const Vec& u, Vec& lambda, Vec& theta_y, Vec& theta_x) {
        lambda.assign(u.begin(), u.begin() + q);
        theta_y.assign(u.begin() + q, u.end());
        theta_x.resize(p);
        for (int i = 0; i < p; ++i) theta_x[i] = theta_y[i] - pi[i];
    };

    // Box on the log arguments: the 1/N floor is the weight-positivity
    // bound; the ceiling blocks the multiplier from running off toward the
    // spurious root at infinity (genuine solutions stay far below it).
    constexpr double kArgCeiling = 1e8;
    const auto feasible = [&](const Vec& u) {
        Vec lambda, theta_y, theta_x, g(q);
        split(u, lambda, theta_y, theta_x);
        for (int j = 0; j < n; ++j) {
            ef_.eval(data_.y().row(j), theta_y, g);
            if (!all_finite(g)) return false;
            const double a = 1.0 + fn * dot(g, lambda);
            if (a <= floor_arg || a >= kArgCeiling) return false;
        }
        for (int i = 0; i < m; ++i) {
            ef_.eval(data_.x().row(i), theta_x, g);
            if (!all_finite(g)) return false;
            const double b = 1.0 - fm * dot(g, lambda);
            if (b <= floor_arg || b >= kArgCeiling) return false;
        }
        return true;
    };

    const auto residual = [&](const Vec& u) {
        Vec lambda, theta_y, theta_x, g(q);
        split(u, lambda, theta_y, theta_x);
        Vec out(2 * q, 0.0);
        for (int j = 0; j < n; ++j) {
            ef_.eval(data_.y().row(j), theta_y, g);
            const double a = 1.0 + fn * dot(g, lambda);
            for (int t = 0; t < q; ++t) out[t] += g[t] / a;
        }
        for (int i = 0; i < m; ++i) {
            ef_.eval(data_.x().row(i), theta_x, g);
            const double b = 1.0 - fm * dot(g, lambda);
            for (int t = 0; t < q; ++t) out[q + t] += g[t] / b;
        }
        for (int t = 0; t < q; ++t) out[t] /= n;
        for (int t = 0; t < q; ++t) out[q + t] /= m;
        return out;
    };

    const auto jacobian = [&](const Vec& u) {
        Vec lambda, theta_y, theta_x, g(q), ltg(p);
        Mat gj(q, p);
        split(u, lambda, theta_y, theta_x);
        Mat out(2 * q, 2 * q);
        for (int j = 0; j < n; ++j) {
            ef_.eval(data_.y().row(j), theta_y, g);
            ef_.jac(data_.y().row(j), theta_y, gj);
            const double a = 1.0 + fn * dot(g, lambda);
            const double a2 = a * a;
            for (int v = 0; v < p; ++v) {
                double s = 0.0;
                for (int t = 0; t < q; ++t) s += lambda[t] * gj(t, v);
                ltg[v] = s;
            }
            for (int t = 0; t < q; ++t) {
                for (int v = 0; v < q; ++v) out(t, v) += -fn * g[t] * g[v] / a2 / n;
                for (int v = 0; v < p; ++v)
                    out(t, q + v) += (gj(t, v) / a - fn * g[t] * ltg[v] / a2) / n;
            }
        }
        for (int i = 0; i < m; ++i) {
            ef_.eval(data_.x().row(i), theta_x, g);
            ef_.jac(data_.x().row(i), theta_x, gj);
            const double b = 1.0 - fm * dot(g, lambda);
            const double b2 = b * b;
            for (int v = 0; v < p; ++v) {
                double s = 0.0;
                for (int t = 0; t < q; ++t) s += lambda[t] * gj(t, v);
                ltg[v] = s;
            }
            for (int t = 0; t < q; ++t) {
                for (int v = 0; v < q; ++v) out(q + t, v) += fm * g[t] * g[v] / b2 / m;
                for (int v = 0; v < p; ++v)
                    out(q + t, q + v) += (gj(t, v) / b + fm * g[t] * ltg[v] / b2) / m;
            }
        }
        return out;
    };

    // initial point: lambda from the warm start when still feasible, zero
    // otherwise (always feasible); theta_y split between the samples
    Vec u0(2 * q, 0.0);
    const double w = static_cast<double>(n) / data_.total();
    if (warm) {
        for (int t = 0; t < q; ++t) u0[t] = warm->lambda[t];
        for (int v = 0; v < p; ++v)
            u0[q + v] = warm->theta_y[v] + w * (pi[v] - warm->pi[v]);
        if (!feasible(u0))
            for (int t = 0; t < q; ++t) u0[t] = 0.0;
    } else {
        for (int v = 0; v < p; ++v)
            u0[q + v] = theta_y_tilde_[v] + w * (pi[v] - pi_tilde_[v]);
    }

    struct Packaged {
        Vec lambda, theta_y, theta_x, wx, wy;
        double loglik = 0.0, min_arg = 0.0;
        double sum_wx = 0.0, sum_wy = 0.0, max_wx = 0.0, max_wy = 0.0;
    };
    const auto package = [&](const Vec& u) {
        Packaged pk;
        Vec g(q);
        split(u, pk.lambda, pk.theta_y, pk.theta_x);
        pk.min_arg = std::numeric_limits<double>::infinity();
        pk.wy.resize(n);
        pk.wx.resize(m);
        for (int j = 0; j < n; ++j) {
            ef_.eval(data_.y().row(j), pk.theta_y, g);
            const double a = 1.0 + fn * dot(g, pk.lambda);
            pk.min_arg = std::min(pk.min_arg, a);
            if (a > 0.0) pk.loglik += 2.0 * std::log(a);
            pk.wy[j] = 1.0 / (n * a);
            pk.sum_wy += pk.wy[j];
            pk.max_wy = std::max(pk.max_wy, pk.wy[j]);
        }
        for (int i = 0; i < m; ++i) {
            ef_.eval(data_.x().row(i), pk.theta_x, g);
            const double b = 1.0 - fm * dot(g, pk.lambda);
            pk.min_arg = std::min(pk.min_arg, b);
            if (b > 0.0) pk.loglik += 2.0 * std::log(b);
            pk.wx[i] = 1.0 / (m * b);
            pk.sum_wx += pk.wx[i];
            pk.max_wx = std::max(pk.max_wx, pk.wx[i]);
        }
        return pk;
    };

    Attempt out;
    NewtonOptions opts;
    opts.tol = 1e-10;
    opts.max_iters = 60;
    NewtonResult r;
    try {
        r = newton_solve(residual, jacobian, u0, opts, feasible);
    } catch (const std::exception&) {
        out.stall = NewtonStall::Stagnation;
        out.threw = true;
        return out;
    }

    Packaged pk = package(r.x);
    out.boundary_margin = pk.min_arg - floor_arg;

    // A genuine root carries unit probability mass per sample (so some weight
    // is at least the uniform one); the spurious root at infinite multiplier
    // has every weight near zero while the block residuals still vanish.
    const bool mass_ok = pk.max_wy >= 0.5 / n && pk.max_wx >= 0.5 / m;
    if (!r.converged || !mass_ok || pk.loglik < -1e-9) {
        out.mass_escape = !mass_ok;
        out.stall = r.converged ? NewtonStall::Stagnation : r.stall;
        return out;
    }

    // polish until the weight-sum identities hold tightly
    if (std::fabs(pk.sum_wx - 1.0) > 1e-9 || std::fabs(pk.sum_wy - 1.0) > 1e-9) {
        NewtonOptions fine = opts;
        fine.tol = 5e-14;
        fine.max_iters = 8;
        try {
            const NewtonResult r2 = newton_solve(residual, jacobian, r.x, fine, feasible);
            const Packaged pk2 = package(r2.x);
            if (std::fabs(pk2.sum_wx - 1.0) + std::fabs(pk2.sum_wy - 1.0) <
                std::fabs(pk.sum_wx - 1.0) + std::fabs(pk.sum_wy - 1.0)) {
                pk = pk2;
                r.iters += r2.iters;
            }
        } catch (const std::exception&) {
            // keep the unpolished solution
        }
    }

    out.ok = true;
    out.stall = NewtonStall::None;
    out.sol.lambda = std::move(pk.lambda);
    out.sol.theta_y = std::move(pk.theta_y);
    out.sol.theta_x = std::move(pk.theta_x);
    out.sol.loglik = std::max(pk.loglik, 0.0);
    out.sol.weights_x = std::move(pk.wx);
    out.sol.weights_y = std::move(pk.wy);
    out.sol.status = DomainStatus::Interior;
    out.sol.iters = r.iters;
    out.sol.pi = pi;
    return out;
}

bool Profiler::boundary_like(const Attempt& a) const {
    if (a.ok) return false;
    if (a.stall == NewtonStall::Boundary || a.mass_escape) return true;
    return a.boundary_margin < 2.0 / data_.smaller_sample();
}

ProfileSolution Profiler::loglik(const Vec& pi, const ProfileSolution* warm) const {
    if (static_cast<int>(pi.size()) != ef_.p)
        throw std::invalid_argument("loglik: pi has wrong dimension");
    if (!all_finite(pi)) throw DomainError("loglik: pi must be finite");

    Vec diff(ef_.p);
    for (int i = 0; i < ef_.p; ++i) diff[i] = pi[i] - pi_tilde_[i];
    if (inf_norm(diff) == 0.0) return trivial_solution();

    Attempt direct = try_solve(pi, warm);
    if (direct.ok) return direct.sol;

    // Continuation from the MELE toward pi. The base grid is 8 equal
    // segments; a failing segment is bisected so that a genuinely interior
    // pi close to the domain boundary is still reached.
    ProfileSolution prev = trivial_solution();
    double prev_t = 0.0;
    double dt = 0.125;
    int total_iters = direct.sol.iters;
    Attempt last_fail = direct;
    Vec pit(ef_.p);
    for (int attempts = 0; attempts < 400; ++attempts) {
        const double t = std::min(1.0, prev_t + dt);
        for (int i = 0; i < ef_.p; ++i) pit[i] = pi_tilde_[i] + t * diff[i];
        Attempt a = try_solve(pit, &prev);
        if (a.ok) {
            total_iters += a.sol.iters;
            prev = std::move(a.sol);
            prev_t = t;
            if (t >= 1.0) {
                prev.iters = total_iters;
                return prev;
            }
            dt = std::min(0.125, dt * 2.0);
        } else {
            if (!a.threw || last_fail.threw) last_fail = std::move(a);
            dt *= 0.5;
            if (dt < 1e-9) break;
        }
    }

    ProfileSolution out;
    out.lambda = prev.lambda;
    out.theta_y = prev.theta_y;
    out.theta_x = prev.theta_x;
    out.pi = pi;
    out.iters = total_iters;
    if (boundary_like(last_fail)) {
        out.status = DomainStatus::Exterior;
        out.loglik = std::numeric_limits<double>::infinity();
    } else {
        out.status = DomainStatus::MaxIters;
        out.loglik = prev.loglik;
    }
    return out;
}

DomainStatus Profiler::status(const Vec& pi) const { return loglik(pi).status; }

Vec Profiler::pi_scale() const {
    const int q = ef_.q, p = ef_.p;
    const auto sample_var = [&](const Mat& sample, const Vec& theta) {
        const int k = sample.rows();
        Mat gamma(q, p), sigma(q, q), gj(q, p);
        Vec g(q);
        for (int i = 0; i < k; ++i) {
            ef_.eval(sample.row(i), theta, g);
            ef_.jac(sample.row(i), theta, gj);
            for (int t = 0; t < q; ++t) {
                for (int v = 0; v < q; ++v) sigma(t, v) += g[t] * g[v] / k;
                for (int v = 0; v < p; ++v) gamma(t, v) += gj(t, v) / k;
            }
        }
        LuDecomposition lu(gamma);
        if (lu.singular()) return Mat();
        const Mat gi = lu.inverse();
        Mat var = gi * sigma * gi.transposed();
        for (int t = 0; t < p; ++t)
            for (int v = 0; v < p; ++v) var(t, v) /= k;
        return var;
    };

    Vec scale(p, 1.0);
    const Mat vx = sample_var(data_.x(), theta_x_tilde_);
    const Mat vy = sample_var(data_.y(), theta_y_tilde_);
    if (vx.rows() == p && vy.rows() == p) {
        for (int i = 0; i < p; ++i) {
            const double v = vx(i, i) + vy(i, i);
            if (std::isfinite(v) && v > 0.0) scale[i] = std::sqrt(v);
        }
    }
    return scale;
}

Vec mele_diff(const EstimatingFunction& ef, const TwoSampleData& data) {
    return Profiler(ef, data).mele_pi();
}

ProfileSolution oel_loglik(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi,
                           const ProfileSolution* warm) {
    return Profiler(ef, data).loglik(pi, warm);
}

DomainStatus domain_status(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi) {
    return Profiler(ef, data).status(pi);
}

}  // namespace twoseel
