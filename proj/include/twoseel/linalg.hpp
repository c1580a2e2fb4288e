#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twoseel {

using Vec = std::vector<double>;

inline double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dot(std::span<const double> a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Dense row-major matrix. Dimensions in this library are tiny (q <= 4 for
// solver systems), so no attempt at blocking or expression templates.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<const double> row(int i) const {
        return {a_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<double> row(int i) {
        return {a_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::fabs(x));
        return m;
    }

    // Max row sum of absolute values.
    double norm_inf() const {
        double m = 0.0;
        for (int i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    bool finite() const {
        for (double x : a_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    const std::vector<double>& data() const { return a_; }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline Mat operator*(const Mat& a, const Mat& b) {
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Vec operator*(const Mat& a, const Vec& v) {
    Vec r(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline Mat operator+(const Mat& a, const Mat& b) {
    Mat c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

inline Mat operator-(const Mat& a, const Mat& b) {
    Mat c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline Mat operator*(double s, const Mat& a) {
    Mat c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
    return c;
}

inline double trace(const Mat& a) {
    double t = 0.0;
    for (int i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

// LU factorization with partial pivoting.
class LuDecomposition {
public:
    explicit LuDecomposition(Mat a) : lu_(std::move(a)), piv_(lu_.rows()) {
        const int n = lu_.rows();
        for (int i = 0; i < n; ++i) piv_[i] = i;
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::fabs(lu_(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double v = std::fabs(lu_(i, k));
                if (v > best) { best = v; p = i; }
            }
            if (p != k) {
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                std::swap(piv_[k], piv_[p]);
            }
            if (best < 1e-300) { singular_ = true; return; }
            const double inv_piv = 1.0 / lu_(k, k);
            for (int i = k + 1; i < n; ++i) {
                const double f = lu_(i, k) * inv_piv;
                lu_(i, k) = f;
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    Vec solve(const Vec& b) const {
        const int n = lu_.rows();
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = b[piv_[i]];
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

    Mat solve(const Mat& b) const {
        const int n = lu_.rows();
        Mat x(n, b.cols());
        Vec col(n);
        for (int j = 0; j < b.cols(); ++j) {
            for (int i = 0; i < n; ++i) col[i] = b(i, j);
            const Vec s = solve(col);
            for (int i = 0; i < n; ++i) x(i, j) = s[i];
        }
        return x;
    }

    Mat inverse() const {
        const int n = lu_.rows();
        Mat inv(n, n);
        Vec e(n, 0.0);
        for (int j = 0; j < n; ++j) {
            e[j] = 1.0;
            Vec col = solve(e);
            for (int i = 0; i < n; ++i) inv(i, j) = col[i];
            e[j] = 0.0;
        }
        return inv;
    }

private:
    Mat lu_;
    std::vector<int> piv_;
    bool singular_ = false;
};

// Infinity-norm condition number via the explicit inverse; adequate for the
// tiny systems handled here.
inline double cond_inf(const Mat& a) {
    LuDecomposition lu(a);
    if (lu.singular()) return std::numeric_limits<double>::infinity();
    return a.norm_inf() * lu.inverse().norm_inf();
}

// Symmetric matrix wrapper. Construction checks symmetry; downstream
// eigen-based operations rely on it.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(Mat m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw std::invalid_argument("SymMatrix: matrix is not square");
        const double scale = std::max(1e-300, m_.max_abs());
        for (int i = 0; i < m_.rows(); ++i)
            for (int j = i + 1; j < m_.cols(); ++j)
                if (std::fabs(m_(i, j) - m_(j, i)) > 1e-12 * scale)
                    throw std::invalid_argument("SymMatrix: asymmetry beyond tolerance at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
        // Wash residual rounding asymmetry so eigen routines see an exactly
        // symmetric matrix.
        for (int i = 0; i < m_.rows(); ++i)
            for (int j = i + 1; j < m_.cols(); ++j) {
                const double v = 0.5 * (m_(i, j) + m_(j, i));
                m_(i, j) = v;
                m_(j, i) = v;
            }
    }

    static SymMatrix identity(int n) { return SymMatrix(Mat::identity(n)); }

    static SymMatrix diagonal(const Vec& d) {
        Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return SymMatrix(std::move(m));
    }

    int dim() const { return m_.rows(); }
    const Mat& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Mat m_;
};

struct EigenSym {
    Vec values;   // ascending
    Mat vectors;  // columns are eigenvectors, orthonormal
};

// Cyclic Jacobi rotations; converges in a handful of sweeps at these sizes.
inline EigenSym jacobi_eigen(const SymMatrix& s) {
    const int n = s.dim();
    Mat a = s.mat();
    Mat v = Mat::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= 1e-30 * std::max(1.0, a.max_abs() * a.max_abs())) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    EigenSym e;
    e.values.resize(n);
    for (int i = 0; i < n; ++i) e.values[i] = a(i, i);
    // sort ascending, permuting vector columns with values
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (e.values[order[j]] < e.values[order[i]]) std::swap(order[i], order[j]);
    Vec sorted(n);
    Mat vec(n, n);
    for (int i = 0; i < n; ++i) {
        sorted[i] = e.values[order[i]];
        for (int k = 0; k < n; ++k) vec(k, i) = v(k, order[i]);
    }
    e.values = std::move(sorted);
    e.vectors = std::move(vec);
    return e;
}

}  // namespace twoseel
