#include "twoseel/eel.hpp"

#include <cmath>
#include <random>

namespace twoseel {

MappingConfig MappingConfig::second_order(double eta, double delta_exponent) {
    if (!std::isfinite(eta)) throw DomainError("MappingConfig: eta must be finite");
    if (!(delta_exponent > 0.0 && delta_exponent < 1.0))
        throw DomainError("MappingConfig: delta exponent must lie in (0, 1)");
    MappingConfig cfg;
    cfg.order = MappingOrder::Two;
    cfg.eta = eta;
    cfg.delta_exponent = delta_exponent;
    return cfg;
}

double gamma1(int total, double l) { return 1.0 + l / (2.0 * total); }

double gamma2(int total, double l, double eta, double delta) {
    if (l == 0.0) return 1.0;  // 0^delta taken as 0, preserving the fixed point
    return 1.0 + eta / (2.0 * total) * std::pow(l, delta);
}

double expansion_factor(const MappingConfig& cfg, int total, double l) {
    return cfg.order == MappingOrder::One ? gamma1(total, l)
                                          : gamma2(total, l, cfg.eta, cfg.delta_exponent);
}

Vec forward_map(const Profiler& prof, const Vec& pi, const MappingConfig& cfg) {
    const ProfileSolution sol = prof.loglik(pi);
    if (sol.status == DomainStatus::Exterior)
        throw ExteriorInput("forward_map: pi is outside the likelihood domain");
    if (sol.status == DomainStatus::MaxIters)
        throw SolverFailure("forward_map: profile solver did not converge");
    const double g = expansion_factor(cfg, prof.data().total(), sol.loglik);
    const Vec& pt = prof.mele_pi();
    Vec out(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) out[i] = pt[i] + g * (pi[i] - pt[i]);
    return out;
}

namespace {

// Ray-walking helper: profile solves along pi~ + t (pi - pi~) with warm
// starts chained from the most recent successful t.
class RayWalker {
public:
    RayWalker(const Profiler& prof, const Vec& pi)
        : prof_(prof), diff_(pi.size()), last_(prof.trivial_solution()) {
        const Vec& pt = prof.mele_pi();
        for (std::size_t i = 0; i < pi.size(); ++i) diff_[i] = pi[i] - pt[i];
    }

    Vec pi_at(double t) const {
        const Vec& pt = prof_.mele_pi();
        Vec out(diff_.size());
        for (std::size_t i = 0; i < diff_.size(); ++i) out[i] = pt[i] + t * diff_[i];
        return out;
    }

    // One warm attempt; falls back to the continuation path before reporting
    // failure so that a hard-but-interior point is not misclassified.
    bool solve(double t, ProfileSolution& out) {
        ++solves_;
        if (t == 0.0) {
            out = prof_.trivial_solution();
            return true;
        }
        const Vec target = pi_at(t);
        Profiler::Attempt a = prof_.try_solve(target, &last_);
        if (a.ok) {
            last_ = a.sol;
            out = std::move(a.sol);
            return true;
        }
        const ProfileSolution full = prof_.loglik(target, &last_);
        if (full.status == DomainStatus::Interior) {
            last_ = full;
            out = full;
            return true;
        }
        return false;
    }

    int solves() const { return solves_; }
    double diff_norm2() const {
        double s = 0.0;
        for (double d : diff_) s += d * d;
        return std::sqrt(s);
    }

private:
    const Profiler& prof_;
    Vec diff_;
    ProfileSolution last_;
    int solves_ = 0;
};

}  // namespace

RayInversion inverse_map(const Profiler& prof, const Vec& pi, const MappingConfig& cfg) {
    if (!all_finite(pi)) throw DomainError("inverse_map: pi must be finite");
    const int total = prof.data().total();
    const Vec& pt = prof.mele_pi();

    RayInversion out;
    Vec diff(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) diff[i] = pi[i] - pt[i];
    if (inf_norm(diff) == 0.0) {
        out.pi_prime = pt;
        return out;
    }

    RayWalker walker(prof, pi);
    ProfileSolution sol;

    const auto phi_of = [&](double t, const ProfileSolution& s) {
        return t * expansion_factor(cfg, total, s.loglik);
    };

    // largest feasible ray parameter in [0, 1]: a halving scan brackets the
    // domain boundary, 12 bisections refine it, and refinement continues
    // while the scaled factor at the bracket still falls short of 1 (the
    // slowly growing second-order factor needs a tighter boundary estimate)
    double t_max = 1.0;
    ProfileSolution sol_at_tmax;
    if (!walker.solve(1.0, sol_at_tmax)) {
        double lo = 0.5, hi = 1.0;
        int halvings = 0;
        while (!walker.solve(lo, sol)) {
            hi = lo;
            lo *= 0.5;
            if (++halvings > 60) throw SolverFailure("inverse_map: no feasible ray point found");
        }
        ProfileSolution sol_lo = sol;
        int bisections = 0;
        while (bisections < 12 ||
               (phi_of(lo, sol_lo) < 1.0 && bisections < 48 && hi - lo > 1e-17)) {
            ++bisections;
            const double mid = 0.5 * (lo + hi);
            if (walker.solve(mid, sol)) {
                lo = mid;
                sol_lo = sol;
            } else {
                hi = mid;
            }
        }
        t_max = lo;
        sol_at_tmax = std::move(sol_lo);
    }

    // scan for the last crossing of phi(t) = 1
    constexpr int kGrid = 64;
    double prev_t = 0.0, prev_phi = 0.0;
    double lo_t = -1.0, hi_t = -1.0, lo_phi = 0.0, hi_phi = 0.0;
    ProfileSolution lo_sol = prof.trivial_solution();
    ProfileSolution hi_sol = prof.trivial_solution();
    ProfileSolution cur;
    ProfileSolution prev_sol = prof.trivial_solution();
    for (int k = 1; k <= kGrid; ++k) {
        const double t = t_max * k / kGrid;
        if (k == kGrid) {
            cur = sol_at_tmax;
        } else if (!walker.solve(t, cur)) {
            throw SolverFailure("inverse_map: profile solve failed inside the feasible range");
        }
        const double phi = phi_of(t, cur);
        if ((prev_phi - 1.0) * (phi - 1.0) <= 0.0) {
            lo_t = prev_t;
            lo_phi = prev_phi;
            lo_sol = prev_sol;
            hi_t = t;
            hi_phi = phi;
            hi_sol = cur;
        }
        prev_t = t;
        prev_phi = phi;
        prev_sol = cur;
    }

    if (lo_t < 0.0) {
        // phi stays on one side of 1; with phi(0) = 0 that means no preimage
        // along the feasible segment. Return the boundary-limit preimage.
        out.no_preimage = true;
        out.t_star = t_max;
        out.pi_prime = walker.pi_at(t_max);
        out.l_at_prime = sol_at_tmax.loglik;
        out.residual = std::fabs(phi_of(t_max, sol_at_tmax) - 1.0) * walker.diff_norm2();
        out.profile_solves = walker.solves();
        return out;
    }

    // bisection refine to |phi - 1| < 1e-10
    double best_t = hi_t, best_phi = hi_phi;
    ProfileSolution best_sol = hi_sol;
    if (std::fabs(lo_phi - 1.0) < std::fabs(hi_phi - 1.0)) {
        best_t = lo_t;
        best_phi = lo_phi;
        best_sol = lo_sol;
    }
    for (int it = 0; it < 200 && std::fabs(best_phi - 1.0) >= 1e-10; ++it) {
        const double mid = 0.5 * (lo_t + hi_t);
        if (hi_t - lo_t < 1e-16 * std::max(1.0, hi_t)) break;
        if (!walker.solve(mid, cur))
            throw SolverFailure("inverse_map: profile solve failed during refinement");
        const double phi = phi_of(mid, cur);
        if (std::fabs(phi - 1.0) < std::fabs(best_phi - 1.0)) {
            best_t = mid;
            best_phi = phi;
            best_sol = cur;
        }
        if ((lo_phi - 1.0) * (phi - 1.0) <= 0.0) {
            hi_t = mid;
            hi_phi = phi;
        } else {
            lo_t = mid;
            lo_phi = phi;
        }
    }

    out.t_star = best_t;
    out.pi_prime = walker.pi_at(best_t);
    out.l_at_prime = best_sol.loglik;
    out.residual = std::fabs(best_phi - 1.0) * walker.diff_norm2();
    out.profile_solves = walker.solves();
    return out;
}

double eel_loglik(const Profiler& prof, const Vec& pi, const MappingConfig& cfg) {
    return inverse_map(prof, pi, cfg).l_at_prime;
}

MonotonicityReport ray_monotonicity_diagnostic(const Profiler& prof, int directions, int points) {
    if (directions < 1 || points < 1)
        throw DomainError("ray_monotonicity_diagnostic: directions and points must be >= 1");
    const int p = prof.ef().p;
    const Vec scale = prof.pi_scale();
    MonotonicityReport report;

    std::vector<Vec> dirs;
    if (p == 1) {
        for (int i = 0; i < directions; ++i) dirs.push_back({(i % 2 == 0 ? 1.0 : -1.0) * scale[0]});
    } else if (p == 2) {
        for (int i = 0; i < directions; ++i) {
            const double ang = 2.0 * M_PI * i / directions;
            dirs.push_back({std::cos(ang) * scale[0], std::sin(ang) * scale[1]});
        }
    } else {
        std::mt19937_64 gen(0x5eedu);
        std::normal_distribution<double> nd;
        for (int i = 0; i < directions; ++i) {
            Vec d(p);
            for (int k = 0; k < p; ++k) d[k] = nd(gen) * scale[k];
            dirs.push_back(std::move(d));
        }
    }

    for (const Vec& d : dirs) {
        RayDiagnostic ray;
        ray.direction = d;

        const auto solve_radius = [&](double r, ProfileSolution& sol) {
            Vec target(p);
            for (int k = 0; k < p; ++k) target[k] = prof.mele_pi()[k] + r * d[k];
            sol = prof.loglik(target);
            report.newton_iters.push_back(sol.iters);
            return sol.status;
        };

        // bracket the domain boundary along the ray by doubling, then bisect
        double r_ok = 0.0, r_bad = 1.0;
        ProfileSolution sol;
        DomainStatus st = solve_radius(r_bad, sol);
        int guard = 0;
        while (st == DomainStatus::Interior && ++guard <= 60) {
            r_ok = r_bad;
            r_bad *= 2.0;
            st = solve_radius(r_bad, sol);
        }
        ray.scan_radius = r_bad;
        if (guard > 60) {
            ray.boundary_radius = r_bad;
        } else {
            for (int b = 0; b < 20; ++b) {
                const double mid = 0.5 * (r_ok + r_bad);
                if (solve_radius(mid, sol) == DomainStatus::Interior)
                    r_ok = mid;
                else
                    r_bad = mid;
            }
            ray.boundary_radius = r_ok;
        }

        double prev_l = 0.0;
        for (int j = 1; j <= points; ++j) {
            const double r = ray.boundary_radius * j / (points + 1);
            if (solve_radius(r, sol) != DomainStatus::Interior) break;
            ray.radii.push_back(r);
            ray.l_values.push_back(sol.loglik);
            if (sol.loglik < prev_l - 1e-9 * (1.0 + std::fabs(prev_l))) ++ray.violations;
            prev_l = sol.loglik;
        }
        report.total_violations += ray.violations;
        report.rays.push_back(std::move(ray));
    }
    return report;
}

MonotonicityReport ray_monotonicity_diagnostic(const EstimatingFunction& ef,
                                               const TwoSampleData& data, int directions,
                                               int points) {
    return ray_monotonicity_diagnostic(Profiler(ef, data), directions, points);
}

Vec forward_map(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi,
                const MappingConfig& cfg) {
    return forward_map(Profiler(ef, data), pi, cfg);
}

RayInversion inverse_map(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi,
                         const MappingConfig& cfg) {
    return inverse_map(Profiler(ef, data), pi, cfg);
}

double eel_loglik(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi,
                  const MappingConfig& cfg) {
    return eel_loglik(Profiler(ef, data), pi, cfg);
}

}  // namespace twoseel
