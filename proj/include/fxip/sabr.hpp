#pragma once

#include "fxip/heston.hpp"   // McControls, McPrice

namespace fxip {

/// Lognormal SABR (backbone exponent 1) under the pseudo-currency EMM;
/// the stochastic short rate r_X = (r_quote + r_base)/2 + sigma^2/8 is
/// integrated pathwise into the discount factor.
struct SabrParams {
    double alpha0 = 0.0;   // sigma(0)
    double nu = 0.0;       // vol of vol
    double rho = 0.0;      // in (-1, 0]
    double f0 = 0.0;
    double r_quote = 0.0;
    double r_base = 0.0;
    double maturity = 0.0;

    void validate() const;
};

/// Terminal pseudo-asset values and the pathwise X-discount factor.
/// sqrt_f and inv_sqrt_f are derived from a single log f state, so
/// sqrt_f[i] * inv_sqrt_f[i] == 1 pathwise.
struct SabrEnsemble {
    std::vector<double> sqrt_f;
    std::vector<double> inv_sqrt_f;
    std::vector<double> discount;      // D_X(0,T)
    std::vector<double> sigma_T;       // terminal vol, exactly lognormal
    bool antithetic = false;
};

SabrEnsemble simulate_sabr(const SabrParams& p, const McControls& mc);
SabrEnsemble simulate_sabr_serial(const SabrParams& p, const McControls& mc);

/// Quote-market call/put at strike K: sqrt(f0) E[D (sqrt f - K/sqrt f)_+].
McPrice sabr_call_quote(const SabrParams& p, const SabrEnsemble& e, double strike);
McPrice sabr_put_quote(const SabrParams& p, const SabrEnsemble& e, double strike);
/// Base-market options on the inverse pair at strike K (base ccy).
McPrice sabr_call_base(const SabrParams& p, const SabrEnsemble& e, double strike);
McPrice sabr_put_base(const SabrParams& p, const SabrEnsemble& e, double strike);

McPrice sabr_call_quote(const SabrParams& p, double strike, const McControls& mc);

} // namespace fxip
