#include "twoseel/bartlett.hpp"

#include <cmath>

namespace twoseel {

namespace {

// covariance with divisor = sample size, residuals centred at the sample mean
Mat scaled_cov(const EstimatingFunction& ef, const Mat& sample, const Vec& theta, double factor) {
    const int k = sample.rows();
    const int q = ef.q;
    Mat gs(k, q);
    Vec g(q), mean(q, 0.0);
    for (int i = 0; i < k; ++i) {
        ef.eval(sample.row(i), theta, g);
        for (int t = 0; t < q; ++t) {
            gs(i, t) = g[t];
            mean[t] += g[t] / k;
        }
    }
    Mat cov(q, q);
    for (int i = 0; i < k; ++i)
        for (int t = 0; t < q; ++t)
            for (int u = 0; u < q; ++u)
                cov(t, u) += (gs(i, t) - mean[t]) * (gs(i, u) - mean[u]) * factor / k;
    return cov;
}

Mat standardized(const EstimatingFunction& ef, const Mat& sample, const Vec& theta,
                 const SymMatrix& v_inv_sqrt) {
    const int k = sample.rows();
    const int q = ef.q;
    Mat z(k, q);
    Vec g(q);
    for (int i = 0; i < k; ++i) {
        ef.eval(sample.row(i), theta, g);
        for (int t = 0; t < q; ++t) {
            double s = 0.0;
            for (int u = 0; u < q; ++u) s += v_inv_sqrt(t, u) * g[u];
            z(i, t) = s;
        }
    }
    return z;
}

}  // namespace

MomentArrays moment_arrays(const EstimatingFunction& ef, const TwoSampleData& data,
                           const Vec& theta_x_tilde, const Vec& theta_y_tilde) {
    const int q = ef.q;
    const double fm = data.fm(), fn = data.fn();
    const int m = data.m(), n = data.n();

    const Mat v1m = scaled_cov(ef, data.y(), theta_y_tilde, fn);
    const Mat v2m = scaled_cov(ef, data.x(), theta_x_tilde, fm);
    SymMatrix v1(v1m), v2(v2m), v(v1m + v2m);
    inv_sqrt(v1);  // degenerate-sample guards
    inv_sqrt(v2);

    LuDecomposition lu(v.mat());
    if (lu.singular()) throw NotPositiveDefinite("moment_arrays: V singular");
    Mat wm = v1.mat() * lu.solve(v2.mat());
    // V1 (V1+V2)^{-1} V2 is symmetric in exact arithmetic; wash rounding
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) {
            const double x = 0.5 * (wm(i, j) + wm(j, i));
            wm(i, j) = x;
            wm(j, i) = x;
        }

    SymMatrix vis = inv_sqrt(v);
    const Mat zy = standardized(ef, data.y(), theta_y_tilde, vis);
    const Mat zx = standardized(ef, data.x(), theta_x_tilde, vis);

    MomentArrays out{q, fm, fn, std::move(v1), std::move(v2), std::move(v), SymMatrix(std::move(wm)),
                     std::move(vis), Vec(static_cast<std::size_t>(q) * q * q, 0.0), 0.0};

    const double cy3 = fn * fn / n, cx3 = fm * fm / m;
    for (int t = 0; t < q; ++t)
        for (int u = 0; u < q; ++u)
            for (int w = 0; w < q; ++w) {
                double sy = 0.0, sx = 0.0;
                for (int j = 0; j < n; ++j) sy += zy(j, t) * zy(j, u) * zy(j, w);
                for (int i = 0; i < m; ++i) sx += zx(i, t) * zx(i, u) * zx(i, w);
                out.s3[(t * q + u) * q + w] = cy3 * sy - cx3 * sx;
            }

    const double cy4 = fn * fn * fn / n, cx4 = fm * fm * fm / m;
    double sy4 = 0.0, sx4 = 0.0;
    for (int j = 0; j < n; ++j) {
        double nrm2 = 0.0;
        for (int t = 0; t < q; ++t) nrm2 += zy(j, t) * zy(j, t);
        sy4 += nrm2 * nrm2;
    }
    for (int i = 0; i < m; ++i) {
        double nrm2 = 0.0;
        for (int t = 0; t < q; ++t) nrm2 += zx(i, t) * zx(i, t);
        sx4 += nrm2 * nrm2;
    }
    out.s4_contracted = cy4 * sy4 + cx4 * sx4;
    return out;
}

BartlettEstimate bartlett_factor(const MomentArrays& arrays, int d) {
    if (d < 1) throw DomainError("bartlett_factor: d must be >= 1");
    BartlettEstimate e;
    e.term_cubic = -arrays.s3_full_contraction() / (3.0 * d);
    e.term_quartic = arrays.s4_contracted / (2.0 * d);
    const Mat inner = arrays.v_inv_sqrt.mat() * arrays.w.mat() * arrays.v_inv_sqrt.mat();
    e.term_trace = arrays.fm * arrays.fn / d * trace(inner);
    e.eta = e.term_cubic + e.term_quartic + e.term_trace;
    return e;
}

BelScale bel_scale(double eta, int total) {
    BelScale s;
    s.scale = 1.0 - eta / total;
    if (s.scale <= 0.0) {
        s.scale = 1.0;
        s.uncorrected = true;
    }
    return s;
}

double bel_loglik(const EstimatingFunction& ef, const TwoSampleData& data, const Vec& pi) {
    Profiler prof(ef, data);
    const MomentArrays arrays = moment_arrays(ef, data, prof.mele_x(), prof.mele_y());
    const BartlettEstimate est = bartlett_factor(arrays, ef.q);
    const ProfileSolution sol = prof.loglik(pi);
    if (sol.status == DomainStatus::Exterior) return std::numeric_limits<double>::infinity();
    if (sol.status == DomainStatus::MaxIters)
        throw NoSolution("bel_loglik: profile solver did not converge");
    return sol.loglik * bel_scale(est.eta, data.total()).scale;
}

}  // namespace twoseel
