#pragma once

#include "twoseel/bartlett.hpp"
#include "twoseel/oel.hpp"

namespace twoseel {

struct ExteriorInput : std::runtime_error {
    explicit ExteriorInput(const std::string& what) : std::runtime_error(what) {}
};

struct SolverFailure : std::runtime_error {
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

enum class MappingOrder { One, Two };

// Expansion-factor configuration. Order One uses 1 + l/(2N); order Two uses
// 1 + eta/(2N) l^delta with the Bartlett factor eta and a delta exponent in
// (0, 1), by default 1/sqrt(smaller sample size).
struct MappingConfig {
    MappingOrder order = MappingOrder::One;
    double eta = 0.0;
    double delta_exponent = 0.5;

    static MappingConfig first_order() { return {}; }
    static MappingConfig second_order(double eta, double delta_exponent);
};

double gamma1(int total, double l);
double gamma2(int total, double l, double eta, double delta);
double expansion_factor(const MappingConfig& cfg, int total, double l);

// Preimage of pi under the composite similarity mapping, found along the ray
// from the MELE through pi: the ray parameter t solves
// t * gamma{N, l(pi~ + t (pi - pi~))} = 1. Among multiple grid crossings the
// largest t (the preimage closest to pi) is kept. A ray whose scaled factor
// never reaches 1 yields the feasible-boundary preimage with no_preimage set.
struct RayInversion {
    double t_star = 0.0;
    Vec pi_prime;
    double l_at_prime = 0.0;
    double residual = 0.0;
    bool no_preimage = false;
    int profile_solves = 0;
};

Vec forward_map(const Profiler& prof, const Vec& pi, const MappingConfig& cfg);
RayInversion inverse_map(const Profiler& prof, const Vec& pi, const MappingConfig& cfg);
double eel_loglik(const Profiler& prof, const Vec& pi, const MappingConfig& cfg);

// Empirical stand-in for the nested-contour condition: walks rays outward
// from the MELE and reports any decrease of l along a ray.
struct RayDiagnostic {
    Vec direction;
    double boundary_radius = 0.0;  // radius at which the domain ends (or scan cap)
    double scan_radius = 0.0;      // first exterior probe of the doubling scan
    Vec radii;
    Vec l_values;
    int violations = 0;

    // boundary position within the scanned bracket, in (0, 1]
    double t_max() const { return scan_radius > 0.0 ? boundary_radius / scan_radius : 1.0; }
};

struct MonotonicityReport {
    std::vector<RayDiagnostic> rays;
    int total_violations = 0;
    std::vector<int> newton_iters;  // iteration counts of every profile solve
};

MonotonicityReport ray_monotonicity_diagnostic(const Profiler& prof, int directions, int points);

// Convenience wrappers that rebuild the profile machinery per call.
MonotonicityReport ray_monotonicity_diagnostic(const EstimatingFunction& ef,
                                               const TwoSampleData& data, int directions,
                                               int points);
Vec forward_map(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi,
                const MappingConfig& cfg);
RayInversion inverse_map(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi,
                         const MappingConfig& cfg);
double eel_loglik(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi,
                  const MappingConfig& cfg);

}  // namespace twoseel
