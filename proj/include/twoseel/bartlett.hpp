#pragma once

#include "twoseel/oel.hpp"

namespace twoseel {

// Plug-in moment arrays evaluated at the MELEs. V1 and V2 are the inflated
// per-sample covariance matrices of the estimating function, V their sum,
// W = V1 V^{-1} V2, and the s-arrays are inflated sample moments of the
// V^{-1/2}-standardized residuals with the two samples combined through
// alternating signs: the l-th order array carries (-1)^l on the x-sample.
struct MomentArrays {
    int q = 0;
    double fm = 0.0, fn = 0.0;
    SymMatrix v1, v2, v, w, v_inv_sqrt;
    Vec s3;                    // q^3 entries, index (t * q + u) * q + w
    double s4_contracted = 0;  // fourth-order array contracted over both pairs

    double s3_at(int t, int u, int w) const { return s3[(t * q + u) * q + w]; }
    double s3_full_contraction() const {
        double s = 0.0;
        for (double x : s3) s += x * x;
        return s;
    }
};

struct BartlettEstimate {
    double eta = 0.0;
    double term_cubic = 0.0;    // -(1/3d) * sum of squared third-order entries
    double term_quartic = 0.0;  // (1/2d) * contracted fourth-order array
    double term_trace = 0.0;    // (fm fn / d) * tr(V^{-1/2} W V^{-1/2})
};

MomentArrays moment_arrays(const EstimatingFunction& ef, const TwoSampleData& data,
                           const Vec& theta_x_tilde, const Vec& theta_y_tilde);

BartlettEstimate bartlett_factor(const MomentArrays& arrays, int d);

// Multiplier applied to the log-likelihood ratio. A non-positive 1 - eta/N
// (small-sample artifact) falls back to no correction and is flagged.
struct BelScale {
    double scale = 1.0;
    bool uncorrected = false;
};
BelScale bel_scale(double eta, int total);

// Bartlett-corrected log-likelihood ratio l(pi) (1 - eta/N). Convenience
// entry point that recomputes the MELEs and moment arrays; batch callers
// should cache those and scale l(pi) themselves.
double bel_loglik(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi);

}  // namespace twoseel
