#include "fxip/esn.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "fxip/math/normal.hpp"

namespace fxip {

using math::bivariate_normal_cdf;
using math::normal_cdf;
using math::normal_pdf;

void EsnParams::validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("EsnParams: a must be positive");
    if (!(beta1 <= beta2)) throw std::invalid_argument("EsnParams: beta1 must be <= beta2");
    if (!(forward > 0.0)) throw std::invalid_argument("EsnParams: forward must be positive");
    if (!(maturity > 0.0)) throw std::invalid_argument("EsnParams: maturity must be positive");
}

double EsnParams::spot() const { return forward * std::exp((r_base - r_quote) * maturity); }

double esn_mgf(const EsnParams& p, double t) {
    const double a = p.a, a1 = p.alpha1, a2 = p.alpha2, b1 = p.beta1, b2 = p.beta2;
    const double at = a * t;
    return std::exp(0.5 * at * at) * (normal_cdf(b2) - normal_cdf(b1)) +
           std::exp(0.5 * t * (t * a * a * (1.0 + a2 * a2) - 2.0 * a * a2 * b2)) *
               normal_cdf(at * a2 - b2) +
           std::exp(0.5 * t * (t * a * a * (1.0 + a1 * a1) + 2.0 * a * a1 * b1)) *
               normal_cdf(at * a1 + b1);
}

double esn_restricted_mgf(const EsnParams& p, double t, double z0) {
    const double a = p.a, a1 = p.alpha1, a2 = p.alpha2, b1 = p.beta1, b2 = p.beta2;
    const double at = a * t;
    const double v0 = z0 / a;

    const double middle =
        std::exp(0.5 * at * at) * normal_cdf(at - v0) * (normal_cdf(b2) - normal_cdf(b1));

    const double s1 = std::sqrt(1.0 + a1 * a1);
    const double left =
        std::exp(0.5 * t * (t * a * a * (1.0 + a1 * a1) + 2.0 * a * a1 * b1)) *
        (normal_cdf(at * a1 + b1) -
         bivariate_normal_cdf(at * a1 + b1, (v0 - at - a1 * (b1 + at * a1)) / s1, -a1 / s1));

    const double s2 = std::sqrt(1.0 + a2 * a2);
    const double right =
        std::exp(0.5 * t * (t * a * a * (1.0 + a2 * a2) - 2.0 * a * a2 * b2)) *
        (normal_cdf(at * a2 - b2) -
         bivariate_normal_cdf(at * a2 - b2, (v0 - at + a2 * (b2 - at * a2)) / s2, -a2 / s2));

    return middle + left + right;
}

double esn_complementary_restricted_mgf(const EsnParams& p, double t, double z0) {
    return esn_mgf(p, t) - esn_restricted_mgf(p, t, z0);
}

double esn_fbar(const EsnParams& p) {
    return p.forward * esn_mgf(p, -0.5) / esn_mgf(p, 0.5);
}

namespace {

struct MgfRatios {
    double m_pos, m_neg;       // M(1/2), M(-1/2)
    double r_pos, r_neg;       // M(1/2, z0), M(-1/2, z0)
    double c_pos, c_neg;       // complements
};

MgfRatios mgf_ratios(const EsnParams& p, double strike) {
    if (!(strike > 0.0)) throw std::invalid_argument("esn pricing: strike must be positive");
    p.validate();
    MgfRatios r;
    r.m_pos = esn_mgf(p, 0.5);
    r.m_neg = esn_mgf(p, -0.5);
    const double z0 = std::log(strike * r.m_pos / (p.forward * r.m_neg));  // log(K / Fbar)
    r.r_pos = esn_restricted_mgf(p, 0.5, z0);
    r.r_neg = esn_restricted_mgf(p, -0.5, z0);
    r.c_pos = r.m_pos - r.r_pos;
    r.c_neg = r.m_neg - r.r_neg;
    return r;
}

} // namespace

double esn_call_quote(const EsnParams& p, double strike) {
    const auto m = mgf_ratios(p, strike);
    return std::exp(-p.r_quote * p.maturity) *
           (p.forward * m.r_pos / m.m_pos - strike * m.r_neg / m.m_neg);
}

double esn_put_quote(const EsnParams& p, double strike) {
    const auto m = mgf_ratios(p, strike);
    return std::exp(-p.r_quote * p.maturity) *
           (strike * m.c_neg / m.m_neg - p.forward * m.c_pos / m.m_pos);
}

double esn_call_base(const EsnParams& p, double strike) {
    const auto m = mgf_ratios(p, strike);
    return std::exp(-p.r_base * p.maturity) *
           (m.c_neg / (p.forward * m.m_neg) - m.c_pos / (strike * m.m_pos));
}

double esn_put_base(const EsnParams& p, double strike) {
    const auto m = mgf_ratios(p, strike);
    return std::exp(-p.r_base * p.maturity) *
           (m.r_pos / (strike * m.m_pos) - m.r_neg / (p.forward * m.m_neg));
}

namespace {

// Partial moments I_n = E[(Y - beta)^n 1{Y > beta}] for standard normal Y,
// by the two-term recursion I_n = (n-1) I_{n-2} - beta I_{n-1}.
std::array<double, 5> half_normal_moments(double beta) {
    std::array<double, 5> m;
    m[0] = normal_cdf(-beta);
    m[1] = normal_pdf(beta) - beta * m[0];
    for (int n = 2; n <= 4; ++n) m[n] = (n - 1) * m[n - 2] - beta * m[n - 1];
    return m;
}

} // namespace

EsnMoments esn_moments(const EsnParams& p) {
    p.validate();
    const auto left = half_normal_moments(-p.beta1);   // moments of max(beta1 - Y, 0)
    const auto right = half_normal_moments(p.beta2);   // moments of max(Y - beta2, 0)

    std::array<double, 5> h{1.0, 0.0, 0.0, 0.0, 0.0};
    double w1 = 1.0, w2 = 1.0;
    for (int n = 1; n <= 4; ++n) {
        w1 *= p.alpha1;
        w2 *= p.alpha2;
        // the two half-normal terms never fire together (beta1 <= beta2)
        h[n] = w1 * left[n] + w2 * right[n];
    }
    constexpr std::array<double, 5> gauss{1.0, 0.0, 1.0, 0.0, 3.0};
    constexpr int choose[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};

    std::array<double, 5> m{};
    for (int n = 0; n <= 4; ++n)
        for (int k = 0; k <= n; ++k) m[n] += choose[n][k] * gauss[k] * h[n - k];

    const double var = m[2] - m[1] * m[1];
    EsnMoments out;
    out.skew = (m[3] - 3.0 * m[1] * m[2] + 2.0 * m[1] * m[1] * m[1]) / std::pow(var, 1.5);
    out.kurtosis = (m[4] - 4.0 * m[1] * m[3] + 6.0 * m[1] * m[1] * m[2] -
                    3.0 * m[1] * m[1] * m[1] * m[1]) /
                   (var * var);
    return out;
}

} // namespace fxip
