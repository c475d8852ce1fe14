#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fxip::math {

/// Dense row-major square matrix, just big enough for correlation work.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static Matrix identity(std::size_t n_) {
        Matrix m(n_);
        for (std::size_t i = 0; i < n_; ++i) m(i, i) = 1.0;
        return m;
    }
};

/// Lower-triangular Cholesky factor of a correlation matrix, computed
/// column by column with the textbook L_ii / L_ji formulas.  Throws
/// std::domain_error when a pivot drops below tol (matrix not PD).
inline Matrix cholesky_lower(const Matrix& r, double tol = 1e-12) {
    const std::size_t n = r.n;
    Matrix l(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = r(i, i);
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * l(i, k);
        if (s <= tol)
            throw std::domain_error("cholesky_lower: matrix is not positive definite");
        l(i, i) = std::sqrt(s);
        for (std::size_t j = i + 1; j < n; ++j) {
            double t = r(j, i);
            for (std::size_t k = 0; k < i; ++k) t -= l(j, k) * l(i, k);
            l(j, i) = t / l(i, i);
        }
    }
    return l;
}

} // namespace fxip::math
