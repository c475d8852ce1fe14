#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace fxip::math {

/// Safeguarded Newton iteration on a bracket [lo, hi]: Newton steps from a
/// secant-estimated derivative, falling back to bisection whenever the step
/// leaves the bracket or fails to shrink it.  f(lo) and f(hi) must differ
/// in sign.  Converges to |f| <= f_tol or a bracket of width x_tol.
inline double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                                  double f_tol, double x_tol = 1e-14, int max_iter = 100) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::domain_error("find_root_bracketed: root not bracketed");

    double x = 0.5 * (lo + hi);
    double fx = f(x);
    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(fx) <= f_tol) return x;
        if ((fx > 0.0) == (fhi > 0.0)) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        if (hi - lo <= x_tol * (1.0 + std::fabs(x))) return x;
        // secant through the bracket endpoints
        double xn = lo - flo * (hi - lo) / (fhi - flo);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
        fx = f(x);
    }
    return x;
}

} // namespace fxip::math
