#pragma once

namespace fxip::math {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, |error| < 1e-15 over the full double range.
double normal_cdf(double x);

/// Inverse standard normal CDF (Wixura's PPND16 rational approximation,
/// relative error below 1e-15 for p in (0,1)).
/// Throws std::domain_error outside (0,1).
double normal_ppf(double p);

/// CDF of the bivariate standard normal with correlation rho,
/// P(X <= x, Y <= y).  Gauss-Legendre scheme after Drezner-Wesolowsky
/// with Genz's tail reformulation for |rho| close to 1; absolute error
/// below ~5e-16.  Infinite arguments are handled (reduce to normal_cdf).
double bivariate_normal_cdf(double x, double y, double rho);

} // namespace fxip::math
