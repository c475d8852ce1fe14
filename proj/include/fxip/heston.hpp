#pragma once

#include <cstdint>
#include <vector>

namespace fxip {

/// Heston dynamics under the pseudo-currency EMM (risk premium already
/// absorbed into kappa/theta); f0 is the base/quote spot.
struct HestonParams {
    double v0 = 0.0;
    double kappa = 0.0;
    double theta = 0.0;
    double delta = 0.0;    // vol of vol
    double rho = 0.0;
    double f0 = 0.0;
    double r_quote = 0.0;
    double r_base = 0.0;
    double maturity = 0.0;

    /// beta = sqrt(kappa^2 + delta^2/4).
    double beta() const;
    /// Checks positivity and the affine-validity condition
    /// kappa / delta^2 > C(tau) for all tau in [0, T] (C is increasing,
    /// so C(T) is the binding value).
    void validate() const;
};

struct McControls {
    std::int64_t n_paths = 0;
    double step = 0.0;       // time step h, capped at maturity
    std::uint64_t seed = 0;
    bool antithetic = false;

    void validate(double maturity) const;
};

/// Affine exponents of the X-bond: P = exp(-(rq+rb)/2 tau + A - C v).
struct AffineAC {
    double a = 0.0;
    double c = 0.0;
};
AffineAC affine_AC(const HestonParams& p, double tau);

/// Zero-coupon bond of the pseudo currency, P_X(t, T) given v(t).
double bond_price(const HestonParams& p, double t, double v_t);

/// Terminal T-forward pairs under the X-bond forward measure.  Both legs
/// are driftless; base_leg(0) = e^{-r_base T} sqrt(f0) / P_X(0,T) and
/// quote_leg(0) = e^{-r_quote T} / (P_X(0,T) sqrt(f0)).
struct ForwardEnsemble {
    std::vector<double> base_leg;    // F_base/X(T,T) = sqrt(f(T))
    std::vector<double> quote_leg;   // F_quote/X(T,T) = 1/sqrt(f(T))
    std::vector<double> variance_T;  // terminal variance per path
    double base_leg0 = 0.0;
    double quote_leg0 = 0.0;
    double min_variance = 0.0;       // smallest v seen across all paths/steps
    bool antithetic = false;         // pairs (2k, 2k+1) share mirrored draws
};

/// OpenMP path kernel; identical bit-for-bit to the serial reference
/// (counter-based per-path streams, output indexed by path).
ForwardEnsemble simulate_forwards(const HestonParams& p, const McControls& mc);
/// Serial reference used by tests and the benchmark.
ForwardEnsemble simulate_forwards_serial(const HestonParams& p, const McControls& mc);

struct McPrice {
    double price = 0.0;
    double std_error = 0.0;
};

/// Ratio estimators of the T-forward pricing formulas with a delta-method
/// standard error; numerator and denominator share the path ensemble.
McPrice price_call_quote(const HestonParams& p, const ForwardEnsemble& e, double strike);
McPrice price_put_quote(const HestonParams& p, const ForwardEnsemble& e, double strike);
/// Base-market options are written on the inverse pair; strike in base ccy.
McPrice price_call_base(const HestonParams& p, const ForwardEnsemble& e, double strike);
McPrice price_put_base(const HestonParams& p, const ForwardEnsemble& e, double strike);

/// Convenience: simulate then price.
McPrice price_call_quote(const HestonParams& p, double strike, const McControls& mc);
McPrice price_call_base(const HestonParams& p, double strike, const McControls& mc);

/// Pathwise Q^X simulation of exp(-int r_X dt); test oracle for the
/// affine bond price.  Returns (mean, standard error).
McPrice discount_factor_mc(const HestonParams& p, const McControls& mc, int n_steps);

} // namespace fxip
