#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fxip::math {

/// Adaptive Gauss-Kronrod integration over [a, b], optionally split at
/// interior breakpoints (smile-domain joins and similar mild kinks).
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        std::vector<double> breakpoints = {}, double tol = 1e-10,
                        int max_depth = 12) {
    using boost::math::quadrature::gauss_kronrod;
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = std::max(a, breakpoints[i]);
        const double hi = std::min(b, breakpoints[i + 1]);
        if (hi <= lo) continue;
        total += gauss_kronrod<double, 15>::integrate(f, lo, hi, max_depth, tol);
    }
    return total;
}

} // namespace fxip::math
