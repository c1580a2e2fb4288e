#pragma once

#include "twoseel/estfun.hpp"
#include "twoseel/numerics.hpp"

namespace twoseel {

struct NoSolution : std::runtime_error {
    explicit NoSolution(const std::string& what) : std::runtime_error(what) {}
};

enum class DomainStatus { Interior, Exterior, MaxIters };

const char* to_string(DomainStatus s);

// Converged profile solution at a fixed difference pi. Interior solutions
// carry the multiplier, both parameter points, the log-likelihood ratio and
// the implied observation weights; Exterior carries an infinite loglik.
struct ProfileSolution {
    Vec lambda;
    Vec theta_y;
    Vec theta_x;
    double loglik = 0.0;
    Vec weights_x;
    Vec weights_y;
    DomainStatus status = DomainStatus::Interior;
    int iters = 0;
    Vec pi;  // the difference this solution profiles
};

// Maximum empirical likelihood estimate: solves the uniform-weight sample
// moment condition (1/k) sum_i g(z_i, theta) = 0 by Newton, retrying from a
// few alternative starts before giving up.
Vec mele(const EstimatingFunction& ef, const Mat& sample);

// Two-sample profile log-likelihood machinery. Construction solves both
// MELEs once; loglik(pi) then solves the 2q-dimensional dual system in
// (lambda, theta_y) with theta_x = theta_y - pi eliminated:
//
//   (1/n) sum_j g(y_j, theta_y) / {1 + f_n lambda' g(y_j, theta_y)} = 0
//   (1/m) sum_i g(x_i, theta_x) / {1 - f_m lambda' g(x_i, theta_x)} = 0
//
// and evaluates l(pi) = 2 [ sum_j log{1 + f_n lambda' g_yj}
//                         + sum_i log{1 - f_m lambda' g_xi} ].
// Log arguments are kept above 1/N during iteration. When a direct solve
// fails, the solution branch is tracked by warm-started continuation from
// the MELE along the segment toward pi (base grid of 8 segments, bisected
// on failure); pi is declared Exterior when the branch stalls against the
// positivity bound strictly before reaching it.
class Profiler {
public:
    Profiler(EstimatingFunction ef, TwoSampleData data);

    const EstimatingFunction& ef() const { return ef_; }
    const TwoSampleData& data() const { return data_; }
    const Vec& mele_x() const { return theta_x_tilde_; }
    const Vec& mele_y() const { return theta_y_tilde_; }
    const Vec& mele_pi() const { return pi_tilde_; }

    ProfileSolution loglik(const Vec& pi, const ProfileSolution* warm = nullptr) const;
    DomainStatus status(const Vec& pi) const;

    // Asymptotic per-coordinate standard deviation of the MELE difference;
    // used as the bracketing scale for interval and boundary searches.
    Vec pi_scale() const;

    // One Newton attempt at pi, without continuation. Used internally and by
    // the ray-walking searches in the mapping module.
    struct Attempt {
        bool ok = false;
        NewtonStall stall = NewtonStall::Stagnation;
        double boundary_margin = std::numeric_limits<double>::infinity();
        // iterate escaped to the spurious root at infinite multiplier, where
        // every weight collapses to zero
        bool mass_escape = false;
        // solve aborted by an exception (no final iterate to inspect)
        bool threw = false;
        ProfileSolution sol;
    };
    Attempt try_solve(const Vec& pi, const ProfileSolution* warm = nullptr) const;

    // Whether a failed attempt looks pinned against the weight-positivity
    // bound rather than merely stagnant.
    bool boundary_like(const Attempt& a) const;

    ProfileSolution trivial_solution() const;

private:
    EstimatingFunction ef_;
    TwoSampleData data_;
    Vec theta_x_tilde_, theta_y_tilde_, pi_tilde_;
};

Vec mele_diff(const EstimatingFunction& ef, const TwoSampleData& data);
ProfileSolution oel_loglik(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi,
                           const ProfileSolution* warm = nullptr);
DomainStatus domain_status(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi);

}  // namespace twoseel
