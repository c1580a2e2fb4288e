#include "twoseel/estfun.hpp"

#include "twoseel/numerics.hpp"

namespace twoseel {

TwoSampleData::TwoSampleData(Mat x, Mat y, int q) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.cols() != y_.cols())
        throw std::invalid_argument("TwoSampleData: samples have different observation dimensions");
    if (x_.rows() <= q || y_.rows() <= q)
        throw InsufficientData("TwoSampleData: need more than q=" + std::to_string(q) +
                               " observations per sample (got m=" + std::to_string(x_.rows()) +
                               ", n=" + std::to_string(y_.rows()) + ")");
    if (!x_.finite() || !y_.finite())
        throw std::invalid_argument("TwoSampleData: non-finite entries");
}

EstimatingFunction mean_ef(int dim) {
    if (dim < 1) throw DomainError("mean_ef: dim must be >= 1");
    EstimatingFunction ef;
    ef.d = ef.p = ef.q = dim;
    ef.eval = [dim](std::span<const double> z, const Vec& theta, Vec& out) {
        for (int i = 0; i < dim; ++i) out[i] = z[i] - theta[i];
    };
    ef.jac = [dim](std::span<const double>, const Vec&, Mat& out) {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out(i, j) = (i == j) ? -1.0 : 0.0;
    };
    return ef;
}

Mat gini_pairs(const Vec& raw) {
    const int k = static_cast<int>(raw.size());
    const int half = k / 2;
    if (half < 1) throw InsufficientData("gini_pairs: need at least two observations");
    for (double v : raw)
        if (!(v >= 0.0)) throw DomainError("gini_pairs: incomes must be non-negative and finite");
    Mat pairs(half, 2);
    for (int i = 0; i < half; ++i) {
        pairs(i, 0) = 0.5 * (raw[i] + raw[half + i]);
        pairs(i, 1) = std::min(raw[i], raw[half + i]);
    }
    return pairs;
}

EstimatingFunction gini_ef() {
    EstimatingFunction ef;
    ef.d = 2;
    ef.p = ef.q = 1;
    ef.eval = [](std::span<const double> z, const Vec& theta, Vec& out) {
        out[0] = z[0] - z[1] - z[0] * theta[0];
    };
    ef.jac = [](std::span<const double> z, const Vec&, Mat& out) { out(0, 0) = -z[0]; };
    return ef;
}

EstimatingFunction regression_ef(int dim_x) {
    if (dim_x < 1) throw DomainError("regression_ef: dim_x must be >= 1");
    EstimatingFunction ef;
    ef.d = dim_x + 1;
    ef.p = ef.q = dim_x;
    ef.eval = [dim_x](std::span<const double> z, const Vec& beta, Vec& out) {
        const double y = z[dim_x];
        double resid = y;
        for (int j = 0; j < dim_x; ++j) resid -= z[j] * beta[j];
        for (int i = 0; i < dim_x; ++i) out[i] = z[i] * resid;
    };
    ef.jac = [dim_x](std::span<const double> z, const Vec&, Mat& out) {
        for (int i = 0; i < dim_x; ++i)
            for (int j = 0; j < dim_x; ++j) out(i, j) = -z[i] * z[j];
    };
    return ef;
}

}  // namespace twoseel
