#pragma once

#include <stdexcept>

namespace fxip {

enum class OptionKind { Call, Put };

/// Inputs for the lognormal closed forms; f0 is the base/quote spot.
struct GkInputs {
    double f0 = 0.0;
    double strike = 0.0;
    double maturity = 0.0;
    double sigma = 0.0;
    double r_quote = 0.0;
    double r_base = 0.0;

    void validate() const;
    double forward() const;
};

/// Garman-Kohlhagen call/put in quote-currency units,
/// C = e^{-r_quote T} (F N(d+) - K N(d-)).
double gk_call(const GkInputs& in);
double gk_put(const GkInputs& in);
double gk_price(const GkInputs& in, OptionKind kind);

/// Floating-strike pseudo-market prices in X units:
/// intermediate_call pays (sqrt f - K/sqrt f)_+, intermediate_put pays
/// (sqrt f / K - 1/sqrt f)_+.  sqrt(f0) * intermediate_call equals the
/// quote-market call and intermediate_put / sqrt(f0) is the base-market
/// put at strike 1/K.
double intermediate_call(const GkInputs& in);
double intermediate_put(const GkInputs& in);

class no_implied_vol : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inverts gk_price for sigma on [1e-6, 5] to 1e-10 price accuracy.
/// Throws no_implied_vol when price is outside the no-arbitrage bounds.
double implied_vol(double price, const GkInputs& in_without_sigma, OptionKind kind);

} // namespace fxip
