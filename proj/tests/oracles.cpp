#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace oracles {

using twoseel::Vec;

double one_sample_mean_el(const Vec& sample, double t) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t k = sample.size();
    Vec g(k);
    double gmin = inf, gmax = -inf;
    for (std::size_t i = 0; i < k; ++i) {
        g[i] = sample[i] - t;
        gmin = std::min(gmin, g[i]);
        gmax = std::max(gmax, g[i]);
    }
    if (!(gmin < 0.0 && gmax > 0.0)) {
        if (gmin == 0.0 && gmax == 0.0) return 0.0;  // degenerate: all equal to t
        return inf;
    }
    // R(s) = sum g_i / (1 + s g_i) is strictly decreasing on the feasible
    // multiplier interval (-1/gmax, -1/gmin)
    const auto resid = [&](double s) {
        double r = 0.0;
        for (double gi : g) r += gi / (1.0 + s * gi);
        return r;
    };
    double lo = -1.0 / gmax, hi = -1.0 / gmin;
    const double width = hi - lo;
    lo += 1e-12 * width;
    hi -= 1e-12 * width;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (resid(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double s = 0.5 * (lo + hi);
    double l = 0.0;
    for (double gi : g) l += 2.0 * std::log(1.0 + s * gi);
    return std::max(l, 0.0);
}

double two_sample_mean_el_bruteforce(const Vec& x, const Vec& y, double pi) {
    const double inf = std::numeric_limits<double>::infinity();
    const double xmin = *std::min_element(x.begin(), x.end());
    const double xmax = *std::max_element(x.begin(), x.end());
    const double ymin = *std::min_element(y.begin(), y.end());
    const double ymax = *std::max_element(y.begin(), y.end());
    double lo = std::max(xmin, ymin - pi);
    double hi = std::min(xmax, ymax - pi);
    if (!(lo < hi)) return inf;
    const double width = hi - lo;
    lo += 1e-12 * width;
    hi -= 1e-12 * width;

    const auto f = [&](double t) {
        return one_sample_mean_el(x, t) + one_sample_mean_el(y, t + pi);
    };
    // golden-section minimization of a convex function
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 300; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return std::min(fc, fd);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

double gini_by_quadrature(const std::function<double(double)>& cdf, double mu, double mid,
                          double upper) {
    const auto surv2 = [&](double x) {
        const double s = 1.0 - cdf(x);
        return s * s;
    };
    const double head = simpson(surv2, 0.0, mid, 400000);
    // log-spaced tail: int surv2 dx = int surv2(e^u) e^u du
    const auto tail_f = [&](double u) {
        const double x = std::exp(u);
        return surv2(x) * x;
    };
    const double tail = simpson(tail_f, std::log(mid), std::log(upper), 400000);
    return 1.0 - (head + tail) / mu;
}

bool point_in_polygon(const std::vector<std::array<double, 2>>& poly, double px, double py) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = poly[i][0], yi = poly[i][1];
        const double xj = poly[j][0], yj = poly[j][1];
        if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) inside = !inside;
    }
    return inside;
}

}  // namespace oracles
