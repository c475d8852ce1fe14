#include "fxip/numeraire.hpp"

#include <cmath>
#include <stdexcept>

namespace fxip {

void PseudoPair::validate() const {
    if (!(f0 > 0.0)) throw std::invalid_argument("PseudoPair: f0 must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("PseudoPair: alpha must lie in (0,1)");
}

MultiPseudoMarket MultiPseudoMarket::equal_weight(std::vector<double> rates,
                                                  std::vector<double> f0,
                                                  std::vector<double> vols, math::Matrix corr) {
    MultiPseudoMarket m;
    m.n = rates.size();
    m.rates = std::move(rates);
    m.f0 = std::move(f0);
    m.vols = std::move(vols);
    m.corr = std::move(corr);
    m.alphas.assign(m.n - 1, 1.0 / static_cast<double>(m.n));
    m.validate();
    return m;
}

void MultiPseudoMarket::validate() const {
    if (n < 2) throw std::invalid_argument("MultiPseudoMarket: need at least 2 currencies");
    if (rates.size() != n) throw std::invalid_argument("MultiPseudoMarket: rates size mismatch");
    if (f0.size() != n - 1 || alphas.size() != n - 1 || vols.size() != n - 1)
        throw std::invalid_argument("MultiPseudoMarket: vector size mismatch");
    for (double f : f0)
        if (!(f > 0.0)) throw std::invalid_argument("MultiPseudoMarket: spots must be positive");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("MultiPseudoMarket: alphas must lie in (0,1)");
    if (corr.n != n - 1) throw std::invalid_argument("MultiPseudoMarket: corr size mismatch");
    for (std::size_t i = 0; i < corr.n; ++i) {
        if (std::fabs(corr(i, i) - 1.0) > 1e-14)
            throw std::invalid_argument("MultiPseudoMarket: corr diagonal must be 1");
        for (std::size_t j = 0; j < i; ++j)
            if (std::fabs(corr(i, j) - corr(j, i)) > 1e-14)
                throw std::invalid_argument("MultiPseudoMarket: corr must be symmetric");
    }
    math::cholesky_lower(corr);  // throws when not PD
}

std::pair<double, double> pseudo_rates(const PseudoPair& p) {
    p.validate();
    return {std::pow(p.f0, p.alpha), std::pow(p.f0, p.alpha - 1.0)};
}

double rx_two_currency(double r_quote, double r_base, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("rx_two_currency: sigma must be >= 0");
    return 0.5 * (r_quote + r_base) + sigma * sigma / 8.0;
}

double rx_multi_equal(const std::vector<double>& rates, const std::vector<double>& sigmas,
                      const math::Matrix& rho) {
    const std::size_t n = rates.size();
    if (n < 2 || sigmas.size() != n - 1 || rho.n != n - 1)
        throw std::invalid_argument("rx_multi_equal: dimension mismatch");
    const double inv_n = 1.0 / static_cast<double>(n);
    double rate_sum = 0.0;
    for (double r : rates) rate_sum += r;
    double var_sum = 0.0;
    for (double s : sigmas) var_sum += s * s;
    double cross = 0.0;
    for (std::size_t k = 0; k < n - 1; ++k)
        for (std::size_t j = 0; j < k; ++j) cross += sigmas[j] * sigmas[k] * rho(j, k);
    return inv_n * rate_sum + 0.5 * inv_n * (1.0 - inv_n) * var_sum - inv_n * inv_n * cross;
}

double rx_multi_general(const std::vector<double>& rates, const std::vector<double>& alphas,
                        const std::vector<double>& sigmas, const math::Matrix& rho) {
    const std::size_t n = rates.size();
    if (n < 2 || alphas.size() != n - 1 || sigmas.size() != n - 1 || rho.n != n - 1)
        throw std::invalid_argument("rx_multi_general: dimension mismatch");
    double alpha_sum = 0.0;
    for (double a : alphas) alpha_sum += a;
    double rx = (1.0 - alpha_sum) * rates[n - 1];
    for (std::size_t j = 0; j < n - 1; ++j) {
        rx += alphas[j] * rates[j];
        rx += 0.5 * alphas[j] * (1.0 - alphas[j]) * sigmas[j] * sigmas[j];
        for (std::size_t k = 0; k < j; ++k)
            rx -= sigmas[j] * alphas[j] * alphas[k] * sigmas[k] * rho(j, k);
    }
    return rx;
}

double rx_multi(const MultiPseudoMarket& m, const std::vector<double>& sigmas,
                const math::Matrix& rho) {
    return rx_multi_general(m.rates, m.alphas, sigmas, rho);
}

std::vector<double> market_prices_of_risk(const MultiPseudoMarket& m,
                                          const std::vector<double>& mus,
                                          const std::vector<double>& sigmas,
                                          const math::Matrix& rho) {
    const std::size_t k = m.n - 1;
    if (mus.size() != k || sigmas.size() != k || rho.n != k)
        throw std::invalid_argument("market_prices_of_risk: dimension mismatch");
    for (double s : sigmas)
        if (!(s > 0.0))
            throw std::invalid_argument("market_prices_of_risk: volatilities must be positive");
    const math::Matrix l = math::cholesky_lower(rho);
    const double inv_n = 1.0 / static_cast<double>(m.n);
    std::vector<double> gamma(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        // the rho_ik sum includes k = i (rho_ii = 1), which carries the
        // sigma_i^2/N term of the written-out recursion
        double corr_term = 0.0;
        for (std::size_t j = 0; j < k; ++j) corr_term += sigmas[j] * rho(i, j);
        double lower = 0.0;
        for (std::size_t j = 0; j < i; ++j) lower += l(i, j) * gamma[j];
        gamma[i] = (m.rates[i] - m.rates[k] + mus[i] - inv_n * sigmas[i] * corr_term -
                    sigmas[i] * lower) /
                   (sigmas[i] * l(i, i));
    }
    return gamma;
}

std::vector<double> risk_premium_residuals(const MultiPseudoMarket& m,
                                           const std::vector<double>& mus,
                                           const std::vector<double>& sigmas,
                                           const math::Matrix& rho,
                                           const std::vector<double>& gammas) {
    const std::size_t k = m.n - 1;
    const math::Matrix l = math::cholesky_lower(rho);
    const double inv_n = 1.0 / static_cast<double>(m.n);
    std::vector<double> res(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double corr_term = 0.0;
        for (std::size_t j = 0; j < k; ++j) corr_term += sigmas[j] * rho(i, j);
        double lg = 0.0;
        for (std::size_t j = 0; j <= i; ++j) lg += l(i, j) * gammas[j];
        res[i] = m.rates[i] - m.rates[k] + mus[i] - inv_n * sigmas[i] * corr_term -
                 sigmas[i] * lg;
    }
    return res;
}

ArbitrageCheck check_no_arbitrage_ratio(double e_sqrt_f, double e_inv_sqrt_f, double f0,
                                        double r_quote, double r_base, double maturity) {
    if (!(e_sqrt_f > 0.0 && e_inv_sqrt_f > 0.0))
        throw std::invalid_argument("check_no_arbitrage_ratio: expectations must be positive");
    ArbitrageCheck c;
    c.ratio = e_sqrt_f / e_inv_sqrt_f;
    c.target = std::exp((r_quote - r_base) * maturity) * f0;
    c.rel_deviation = c.ratio / c.target - 1.0;
    return c;
}

ArbitrageCheck check_no_arbitrage_ratio_multi(double e_si_x, double e_sn_x, double fi0,
                                              double r_i, double r_n, double maturity) {
    if (!(e_si_x > 0.0 && e_sn_x > 0.0))
        throw std::invalid_argument("check_no_arbitrage_ratio_multi: expectations must be positive");
    ArbitrageCheck c;
    c.ratio = e_si_x / e_sn_x;
    c.target = std::exp((r_n - r_i) * maturity) * fi0;
    c.rel_deviation = c.ratio / c.target - 1.0;
    return c;
}

} // namespace fxip
