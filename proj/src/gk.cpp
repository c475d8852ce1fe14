#include "fxip/gk.hpp"

#include <algorithm>
#include <cmath>

#include "fxip/math/normal.hpp"
#include "fxip/math/roots.hpp"

namespace fxip {

using math::normal_cdf;

void GkInputs::validate() const {
    if (!(f0 > 0.0 && strike > 0.0 && maturity > 0.0 && sigma > 0.0))
        throw std::invalid_argument("GkInputs: f0, strike, maturity and sigma must be positive");
}

double GkInputs::forward() const { return f0 * std::exp((r_quote - r_base) * maturity); }

namespace {

struct DPlusMinus {
    double dp, dm;
};

DPlusMinus d_terms(double forward, double strike, double sigma, double maturity) {
    const double sq = sigma * std::sqrt(maturity);
    const double dp = (std::log(forward / strike) + 0.5 * sigma * sigma * maturity) / sq;
    return {dp, dp - sq};
}

} // namespace

double gk_call(const GkInputs& in) {
    in.validate();
    const double f = in.forward();
    const auto [dp, dm] = d_terms(f, in.strike, in.sigma, in.maturity);
    return std::exp(-in.r_quote * in.maturity) * (f * normal_cdf(dp) - in.strike * normal_cdf(dm));
}

double gk_put(const GkInputs& in) {
    in.validate();
    const double f = in.forward();
    const auto [dp, dm] = d_terms(f, in.strike, in.sigma, in.maturity);
    return std::exp(-in.r_quote * in.maturity) *
           (in.strike * normal_cdf(-dm) - f * normal_cdf(-dp));
}

double gk_price(const GkInputs& in, OptionKind kind) {
    return kind == OptionKind::Call ? gk_call(in) : gk_put(in);
}

double intermediate_call(const GkInputs& in) {
    in.validate();
    const double sq = in.sigma * std::sqrt(in.maturity);
    const double num = std::log(in.f0 / in.strike) + (in.r_quote - in.r_base) * in.maturity;
    const double d1 = (num + 0.5 * in.sigma * in.sigma * in.maturity) / sq;
    const double d2 = (num - 0.5 * in.sigma * in.sigma * in.maturity) / sq;
    const double rt = std::sqrt(in.f0);
    return rt * std::exp(-in.r_base * in.maturity) * normal_cdf(d1) -
           (in.strike / rt) * std::exp(-in.r_quote * in.maturity) * normal_cdf(d2);
}

double intermediate_put(const GkInputs& in) {
    in.validate();
    const double sq = in.sigma * std::sqrt(in.maturity);
    const double num = std::log(in.f0 / in.strike) + (in.r_quote - in.r_base) * in.maturity;
    const double d1 = (num + 0.5 * in.sigma * in.sigma * in.maturity) / sq;
    const double d2 = (num - 0.5 * in.sigma * in.sigma * in.maturity) / sq;
    const double rt = std::sqrt(in.f0);
    return (rt / in.strike) * std::exp(-in.r_base * in.maturity) * normal_cdf(d1) -
           (1.0 / rt) * std::exp(-in.r_quote * in.maturity) * normal_cdf(d2);
}

double implied_vol(double price, const GkInputs& in_without_sigma, OptionKind kind) {
    GkInputs in = in_without_sigma;
    const double f = in.f0 * std::exp((in.r_quote - in.r_base) * in.maturity);
    const double df = std::exp(-in.r_quote * in.maturity);
    const double intrinsic = kind == OptionKind::Call ? df * std::max(f - in.strike, 0.0)
                                                      : df * std::max(in.strike - f, 0.0);
    const double cap = kind == OptionKind::Call ? df * f : df * in.strike;
    if (!(price > intrinsic) || !(price < cap))
        throw no_implied_vol("implied_vol: price outside no-arbitrage bounds");

    auto objective = [&](double sigma) {
        in.sigma = sigma;
        return gk_price(in, kind) - price;
    };
    return math::find_root_bracketed(objective, 1e-6, 5.0, 1e-10, 1e-14, 100);
}

} // namespace fxip
