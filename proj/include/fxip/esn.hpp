#pragma once

namespace fxip {

/// Terminal-law model for a pair: f(T) = Fbar * exp(Z) with Z = a V and
/// V = X + alpha1 max(beta1 - Y, 0) + alpha2 max(Y - beta2, 0),
/// X, Y independent standard normals.  Fbar is pinned by no-arbitrage.
struct EsnParams {
    double a = 0.0;        // scale, sigma * sqrt(T)
    double alpha1 = 0.0;   // left half-normal weight
    double alpha2 = 0.0;   // right half-normal weight
    double beta1 = -0.5;
    double beta2 = 0.5;
    double forward = 0.0;  // F_{base/quote}(0,T)
    double r_quote = 0.0;
    double r_base = 0.0;
    double maturity = 0.0;

    void validate() const;
    double spot() const;   // f0 = F exp((r_base - r_quote) T)
};

/// MGF M(t) = E[exp(t Z)]; exact in closed form, M(0) = 1.
double esn_mgf(const EsnParams& p, double t);

/// Restricted MGF M(t, z0) = E[exp(t Z) 1{Z > z0}].
double esn_restricted_mgf(const EsnParams& p, double t, double z0);

/// Complement M*(t, z0) = E[exp(t Z) 1{Z < z0}] = M(t) - M(t, z0).
double esn_complementary_restricted_mgf(const EsnParams& p, double t, double z0);

/// No-arbitrage location: Fbar = F M(-1/2) / M(1/2).
double esn_fbar(const EsnParams& p);

/// Closed-form option prices.  Quote-market options are written on the
/// pair at strike K (prices in quote currency); base-market options are
/// written on the inverse pair at strike 1/K (prices in base currency).
double esn_call_quote(const EsnParams& p, double strike);
double esn_put_quote(const EsnParams& p, double strike);
double esn_call_base(const EsnParams& p, double strike);
double esn_put_base(const EsnParams& p, double strike);

struct EsnMoments {
    double skew = 0.0;
    double kurtosis = 0.0;
};

/// Skew and kurtosis of Z from the analytic raw moments of V
/// (Gaussian plus truncated half-normal partial moments).
EsnMoments esn_moments(const EsnParams& p);

} // namespace fxip
