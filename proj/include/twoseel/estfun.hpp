#pragma once

#include <functional>
#include <utility>

#include "twoseel/linalg.hpp"

namespace twoseel {

struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

// Moment condition E g(Z, theta0) = 0 together with its theta-Jacobian.
// Only just-determined systems (p == q) are supported.
struct EstimatingFunction {
    int d = 0;  // observation dimension
    int p = 0;  // parameter dimension
    int q = 0;  // equation dimension
    std::function<void(std::span<const double> z, const Vec& theta, Vec& out)> eval;
    std::function<void(std::span<const double> z, const Vec& theta, Mat& out)> jac;

    Vec eval_at(std::span<const double> z, const Vec& theta) const {
        Vec g(q);
        eval(z, theta, g);
        return g;
    }
    Mat jac_at(std::span<const double> z, const Vec& theta) const {
        Mat j(q, p);
        jac(z, theta, j);
        return j;
    }
};

// Two independent samples sharing an estimating function. Rows are
// observations. Requires m, n > q and all entries finite.
class TwoSampleData {
public:
    TwoSampleData(Mat x, Mat y, int q);

    const Mat& x() const { return x_; }
    const Mat& y() const { return y_; }
    int m() const { return x_.rows(); }
    int n() const { return y_.rows(); }
    int total() const { return m() + n(); }
    double fm() const { return static_cast<double>(total()) / m(); }
    double fn() const { return static_cast<double>(total()) / n(); }
    int smaller_sample() const { return std::min(m(), n()); }
    bool x_is_larger() const { return m() >= n(); }

private:
    Mat x_, y_;
};

// g(z, theta) = z - theta.
EstimatingFunction mean_ef(int dim);

// Paired transformation behind the Gini estimating equation: from k raw
// incomes builds floor(k/2) rows (T_i, Z_i) with T_i the pair mean of
// raw_i and raw_{floor(k/2)+i} and Z_i the pair minimum. An odd trailing
// observation is unused.
Mat gini_pairs(const Vec& raw);

// g((T, Z), theta) = T - Z - T * theta; the Gini index solves E g = 0.
EstimatingFunction gini_ef();

// Linear regression score g((x, y), beta) = x (y - x^T beta), with x the
// dim_x-vector of regressors whose first coordinate is the intercept 1.
// Observation rows are (x_1..x_dim_x, y).
EstimatingFunction regression_ef(int dim_x);

}  // namespace twoseel
