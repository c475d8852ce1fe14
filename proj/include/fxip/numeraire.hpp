#pragma once

#include <cstddef>
#include <vector>

#include "fxip/math/cholesky.hpp"

namespace fxip {

/// Two-currency pseudo-market: the virtual numeraire X with exchange
/// rates S_base/X = f^alpha and S_quote/X = f^(alpha-1).
struct PseudoPair {
    double f0 = 0.0;       // current base/quote exchange rate
    double r_quote = 0.0;
    double r_base = 0.0;
    double alpha = 0.5;

    void validate() const;
};

/// N-currency pseudo-market.  f0[j] = S_{c_j/c_N}(0); exponents
/// b_ii = 1 - alpha_i, b_ij = -alpha_j for i != j.
struct MultiPseudoMarket {
    std::size_t n = 0;                 // number of currencies, >= 2
    std::vector<double> rates;         // n entries
    std::vector<double> f0;            // n-1 spot rates vs c_N
    std::vector<double> alphas;        // n-1 exponents, default 1/n
    std::vector<double> vols;          // n-1 volatilities
    math::Matrix corr;                 // (n-1)x(n-1), unit diagonal, PD

    static MultiPseudoMarket equal_weight(std::vector<double> rates, std::vector<double> f0,
                                          std::vector<double> vols, math::Matrix corr);
    void validate() const;
};

/// (S_base/X(0), S_quote/X(0)) = (f0^alpha, f0^(alpha-1)).
std::pair<double, double> pseudo_rates(const PseudoPair& p);

/// Short rate of X for one pair: (r_quote + r_base)/2 + sigma^2/8.
double rx_two_currency(double r_quote, double r_base, double sigma);

/// Equal-weight (alpha_j = 1/N) multi-currency pseudo short rate:
/// (1/N) sum r_i + (1/2N)(1 - 1/N) sum sigma_i^2
///   - (1/N^2) sum_{k} sum_{j<k} sigma_j sigma_k rho_jk.
double rx_multi_equal(const std::vector<double>& rates, const std::vector<double>& sigmas,
                      const math::Matrix& rho);

/// General-exponent variant:
/// (1 - sum alpha_j) r_N + sum alpha_j r_j + sum alpha_j(1-alpha_j)/2 sigma_j^2
///   - sum_{j} sum_{k<j} sigma_j alpha_j alpha_k sigma_k rho_jk.
/// Coincides with rx_multi_equal at alpha_j = 1/N.
double rx_multi_general(const std::vector<double>& rates, const std::vector<double>& alphas,
                        const std::vector<double>& sigmas, const math::Matrix& rho);

/// Dispatches on m.alphas (general formula; both agree at 1/N).
double rx_multi(const MultiPseudoMarket& m, const std::vector<double>& sigmas,
                const math::Matrix& rho);

/// Market prices of risk gamma_1..gamma_{N-1} by forward recursion with
/// the lower-triangular Cholesky factor L of rho:
///   gamma_i = (r_i - r_N + mu_i - (sigma_i/N) sum_k sigma_k rho_ik
///              - sigma_i sum_{k<i} L_ik gamma_k) / (sigma_i L_ii).
/// Substituting back satisfies the defining linear relations to ~1e-12.
std::vector<double> market_prices_of_risk(const MultiPseudoMarket& m,
                                          const std::vector<double>& mus,
                                          const std::vector<double>& sigmas,
                                          const math::Matrix& rho);

/// Residuals of the defining relations
///   r_i - r_N + mu_i - (sigma_i/N) sum_k sigma_k rho_ik - sigma_i (L gamma)_i
/// used by tests and diagnostics.
std::vector<double> risk_premium_residuals(const MultiPseudoMarket& m,
                                           const std::vector<double>& mus,
                                           const std::vector<double>& sigmas,
                                           const math::Matrix& rho,
                                           const std::vector<double>& gammas);

struct ArbitrageCheck {
    double ratio = 0.0;          // E[sqrt f] / E[1/sqrt f]
    double target = 0.0;         // exp((r_quote - r_base) T) f0
    double rel_deviation = 0.0;  // ratio/target - 1
};

/// No-arbitrage ratio diagnostic for a pair: the caller supplies the
/// pricing-measure expectations of sqrt(f(T)) and 1/sqrt(f(T))
/// (discount-weighted when working under Q^X).
ArbitrageCheck check_no_arbitrage_ratio(double e_sqrt_f, double e_inv_sqrt_f, double f0,
                                        double r_quote, double r_base, double maturity);

/// Multi-currency variant for one pair i against the anchor currency:
/// ratio E[S_{c_i/X}] / E[S_{c_N/X}] against exp((r_N - r_i) T) f_i(0).
ArbitrageCheck check_no_arbitrage_ratio_multi(double e_si_x, double e_sn_x, double fi0,
                                              double r_i, double r_n, double maturity);

} // namespace fxip
