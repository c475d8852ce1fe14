#include "fxip/model_free.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "fxip/math/integrate.hpp"
#include "fxip/math/normal.hpp"
#include "fxip/parallel.hpp"

namespace fxip {

using math::bivariate_normal_cdf;
using math::normal_cdf;
using math::normal_pdf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double black_call(double forward, double strike, double sigma, double maturity, double df) {
    const double sq = sigma * std::sqrt(maturity);
    const double dp = (std::log(forward / strike) + 0.5 * sigma * sigma * maturity) / sq;
    return df * (forward * normal_cdf(dp) - strike * normal_cdf(dp - sq));
}

struct DTerms {
    double dp, dm;
};

DTerms d_terms(double forward, double strike, double sigma, double maturity) {
    const double sq = sigma * std::sqrt(maturity);
    const double dp = (std::log(forward / strike) + 0.5 * sigma * sigma * maturity) / sq;
    return {dp, dp - sq};
}

std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

} // namespace

SmileCurve::SmileCurve(const std::array<double, 3>& strikes, const std::array<double, 3>& vols,
                       double maturity)
    : maturity_(maturity) {
    if (!(strikes[0] < strikes[1] && strikes[1] < strikes[2]))
        throw std::invalid_argument("SmileCurve: anchor strikes must be strictly increasing");
    for (double v : vols)
        if (!(v > 0.0)) throw std::invalid_argument("SmileCurve: anchor vols must be positive");
    if (!(maturity > 0.0)) throw std::invalid_argument("SmileCurve: maturity must be positive");

    // quadratic through (K_i, exp(vol_i^2)) by elimination
    const double y0 = std::exp(vols[0] * vols[0]);
    const double y1 = std::exp(vols[1] * vols[1]);
    const double y2 = std::exp(vols[2] * vols[2]);
    const double d01 = (y1 - y0) / (strikes[1] - strikes[0]);
    const double d12 = (y2 - y1) / (strikes[2] - strikes[1]);
    p1_ = (d12 - d01) / (strikes[2] - strikes[0]);
    p2_ = d01 - p1_ * (strikes[0] + strikes[1]);
    p3_ = y0 - strikes[0] * (p1_ * strikes[0] + p2_);

    k_min_ = strikes[0];
    k_max_ = strikes[2];
    const double range = k_max_ - k_min_;
    const double floor_q = std::exp(0.04 * vols[1] * vols[1]);  // keeps sigma above vol_atm/5
    auto quadratic = [&](double k) { return (p1_ * k + p2_) * k + p3_; };

    // extension shrinks until the continued quadratic stays clear of 1
    ext_hi_ = 0.25 * range;
    while (ext_hi_ > 1e-3 * range && !(quadratic(k_max_ + ext_hi_) > floor_q)) ext_hi_ *= 0.5;
    ext_lo_ = 0.25 * range;
    while (ext_lo_ > 1e-3 * range &&
           !(k_min_ - ext_lo_ > 0.0 && quadratic(k_min_ - ext_lo_) > floor_q))
        ext_lo_ *= 0.5;

    for (double k : {k_min_ - ext_lo_, k_min_, strikes[1], k_max_, k_max_ + ext_hi_})
        if (!(quadratic(k) > 1.0))
            throw std::invalid_argument("SmileCurve: quadratic must stay above 1 on the domain");
}

SmileCurve SmileCurve::from_quote(const PairQuote& q) {
    return SmileCurve({strike_from_delta(q, SmileTag::Put25), strike_from_delta(q, SmileTag::Atm),
                       strike_from_delta(q, SmileTag::Call25)},
                      {q.vol_put25, q.vol_atm, q.vol_call25}, q.maturity);
}

double SmileCurve::map_strike(double k, double& jacobian) const {
    jacobian = 1.0;
    if (k > k_max_) {
        if (std::isinf(k)) {
            jacobian = 0.0;
            return k_max_ + ext_hi_;
        }
        const double x = (k - k_max_) / ext_hi_;
        jacobian = 1.0 / ((1.0 + x) * (1.0 + x));
        return k_max_ + ext_hi_ * x / (1.0 + x);
    }
    if (k < k_min_) {
        const double x = (k_min_ - k) / ext_lo_;
        jacobian = 1.0 / ((1.0 + x) * (1.0 + x));
        return k_min_ - ext_lo_ * x / (1.0 + x);
    }
    return k;
}

double SmileCurve::vol(double strike) const {
    if (!(strike > 0.0)) throw std::invalid_argument("SmileCurve::vol: strike must be positive");
    double j;
    const double kc = map_strike(strike, j);
    return std::sqrt(std::log((p1_ * kc + p2_) * kc + p3_));
}

double SmileCurve::dvol_dk(double strike) const {
    if (!(strike > 0.0))
        throw std::invalid_argument("SmileCurve::dvol_dk: strike must be positive");
    double j;
    const double kc = map_strike(strike, j);
    if (j == 0.0) return 0.0;
    const double q = (p1_ * kc + p2_) * kc + p3_;
    const double s = std::sqrt(std::log(q));
    return j * (2.0 * p1_ * kc + p2_) / (2.0 * q * s);
}

TriangleMarket TriangleMarket::from_snapshot(const MarketSnapshot& snap, const Currency& c1,
                                             const Currency& c2, const Currency& c3) {
    const PairQuote q1 = snap.find_pair(c1, c3);
    const PairQuote q2 = snap.find_pair(c2, c3);
    const PairQuote q3 = snap.find_pair(c1, c2);
    if (q1.maturity != q2.maturity || q1.maturity != q3.maturity)
        throw market_error("triangle quotes must share the maturity");
    TriangleMarket t{SmileCurve::from_quote(q1), SmileCurve::from_quote(q2),
                     SmileCurve::from_quote(q3)};
    t.f1 = forward_rate(q1);
    t.f2 = forward_rate(q2);
    t.f3 = t.f1 / t.f2;  // cross forward pinned by the triangle
    t.spot1 = q1.spot;
    t.r1 = q1.r_base;
    t.r2 = q2.r_base;
    t.r3 = q1.r_quote;
    t.maturity = q1.maturity;
    return t;
}

double TriangleMarket::rho12(double k1, double k2) const {
    const double s1 = smile1.vol(k1);
    const double s2 = smile2.vol(k2);
    const double s3 = smile3.vol(k1 / k2);
    return (s1 * s1 + s2 * s2 - s3 * s3) / (2.0 * s1 * s2);
}

bool TriangleMarket::triangle_ok(double k1, double k2) const {
    const double s1 = smile1.vol(k1);
    const double s2 = smile2.vol(k2);
    const double s3 = smile3.vol(k1 / k2);
    return s1 + s2 > s3 && s2 + s3 > s1 && s1 + s3 > s2;
}

double single_pair_density(const SmileCurve& smile, double forward, double r_quote,
                           double maturity, double strike, double h_rel) {
    if (!(strike > 0.0) || !std::isfinite(strike))
        throw std::domain_error("single_pair_density: strike too close to the domain boundary");
    const double h = h_rel * strike;
    const double df = std::exp(-r_quote * maturity);
    auto c = [&](double k) { return black_call(forward, k, smile.vol(k), maturity, df); };
    return (c(strike + h) - 2.0 * c(strike) + c(strike - h)) / (h * h);
}

namespace {

struct TriangleVols {
    double s1, s2, s3;
    double r12, r13, r23;
};

TriangleVols triangle_vols(const TriangleMarket& t, double k1, double k2) {
    TriangleVols v;
    v.s1 = t.smile1.vol(k1);
    v.s2 = t.smile2.vol(k2);
    v.s3 = t.smile3.vol(k1 / k2);
    v.r12 = (v.s1 * v.s1 + v.s2 * v.s2 - v.s3 * v.s3) / (2.0 * v.s1 * v.s2);
    v.r13 = (v.s1 * v.s1 + v.s3 * v.s3 - v.s2 * v.s2) / (2.0 * v.s1 * v.s3);
    v.r23 = (v.s2 * v.s2 + v.s3 * v.s3 - v.s1 * v.s1) / (2.0 * v.s2 * v.s3);
    if (!(std::fabs(v.r12) < 1.0 && std::fabs(v.r13) < 1.0 && std::fabs(v.r23) < 1.0))
        throw inconsistent_smiles("smile triple violates the triangle conditions at (" +
                                  std::to_string(k1) + ", " + std::to_string(k2) + ")");
    return v;
}

} // namespace

double best_of_value(const TriangleMarket& t, double k1, double k2) {
    if (!(k1 > 0.0 && k2 > 0.0))
        throw std::invalid_argument("best_of_value: strikes must be positive");
    const auto v = triangle_vols(t, k1, k2);
    const double tt = t.maturity;
    const auto d1 = d_terms(t.f1, k1, v.s1, tt);
    const auto d2 = d_terms(t.f2, k2, v.s2, tt);
    const auto d3 = d_terms(t.f3, k1 / k2, v.s3, tt);
    return std::exp(-t.r3 * tt) *
           (t.f1 / k1 * bivariate_normal_cdf(d1.dp, d3.dp, v.r13) +
            t.f2 / k2 * bivariate_normal_cdf(d2.dp, -d3.dm, v.r23) +
            bivariate_normal_cdf(-d1.dm, -d2.dm, v.r12) - 1.0);
}

double best_of_u(const TriangleMarket& t, double k1, double k2) {
    const double tt = t.maturity;
    const double df = std::exp(-t.r3 * tt);
    const double sqt = std::sqrt(tt);
    if (std::isinf(k1) && std::isinf(k2)) return 0.0;
    if (std::isinf(k1)) {
        const double s2 = t.smile2.vol(k2);
        const auto d2 = d_terms(t.f2, k2, s2, tt);
        return df * (normal_cdf(-d2.dm) + k2 * sqt * t.smile2.dvol_dk(k2) * normal_pdf(d2.dm) -
                     1.0);
    }
    if (std::isinf(k2)) {
        const double s1 = t.smile1.vol(k1);
        const auto d1 = d_terms(t.f1, k1, s1, tt);
        return df * (normal_cdf(-d1.dm) + k1 * sqt * t.smile1.dvol_dk(k1) * normal_pdf(d1.dm) -
                     1.0);
    }
    const auto v = triangle_vols(t, k1, k2);
    const auto d1 = d_terms(t.f1, k1, v.s1, tt);
    const auto d2 = d_terms(t.f2, k2, v.s2, tt);
    const double root = std::sqrt(1.0 - v.r12 * v.r12);
    return df * (bivariate_normal_cdf(-d1.dm, -d2.dm, v.r12) +
                 k1 * sqt * t.smile1.dvol_dk(k1) * normal_pdf(d1.dm) *
                     normal_cdf((d1.dm * v.r12 - d2.dm) / root) +
                 k2 * sqt * t.smile2.dvol_dk(k2) * normal_pdf(d2.dm) *
                     normal_cdf((d2.dm * v.r12 - d1.dm) / root) -
                 1.0);
}

namespace {

template <bool Parallel>
DensityGrid density_impl(const TriangleMarket& t, const std::vector<double>& k1_grid,
                         const std::vector<double>& k2_grid, double h_rel) {
    DensityGrid g;
    g.k1 = k1_grid;
    g.k2 = k2_grid;
    g.r3 = t.r3;
    g.maturity = t.maturity;
    const std::size_t n1 = k1_grid.size(), n2 = k2_grid.size();
    g.u.assign(n1, std::vector<double>(n2, 0.0));
    g.d.assign(n1, std::vector<double>(n2, 0.0));

#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_count()) if (Parallel)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n1); ++i) {
        const double k1 = k1_grid[i];
        const double h1 = h_rel * k1;
        for (std::size_t j = 0; j < n2; ++j) {
            const double k2 = k2_grid[j];
            const double h2 = h_rel * k2;
            g.u[i][j] = best_of_u(t, k1, k2);
            g.d[i][j] = (best_of_u(t, k1 + h1, k2 + h2) - best_of_u(t, k1 + h1, k2 - h2) -
                         best_of_u(t, k1 - h1, k2 + h2) + best_of_u(t, k1 - h1, k2 - h2)) /
                        (4.0 * h1 * h2);
        }
    }

    g.min_density = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            if (g.d[i][j] < 0.0) ++g.negative_count;
            if (g.d[i][j] < g.min_density) {
                g.min_density = g.d[i][j];
                g.worst_k1 = k1_grid[i];
                g.worst_k2 = k2_grid[j];
            }
        }
    return g;
}

} // namespace

DensityGrid scaled_joint_density(const TriangleMarket& t, const std::vector<double>& k1_grid,
                                 const std::vector<double>& k2_grid, double h_rel) {
    return density_impl<true>(t, k1_grid, k2_grid, h_rel);
}

DensityGrid scaled_joint_density_serial(const TriangleMarket& t,
                                        const std::vector<double>& k1_grid,
                                        const std::vector<double>& k2_grid, double h_rel) {
    return density_impl<false>(t, k1_grid, k2_grid, h_rel);
}

std::vector<double> make_strike_grid(double forward, double vol_atm, double maturity, int n,
                                     double width_sigmas) {
    if (n < 2) throw std::invalid_argument("make_strike_grid: need at least 2 points");
    const double w = width_sigmas * vol_atm * std::sqrt(maturity);
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = forward * std::exp(-w + 2.0 * w * i / (n - 1));
    return grid;
}

namespace {

// z-values where the integration path touches a smile join.
void add_join_breakpoints(const TriangleMarket& t, double w1, double w2, double strike,
                          std::vector<double>& out) {
    if (w1 > 0.0)
        for (double k : t.smile1.joins()) out.push_back(k * w1);
    if (w2 > 0.0)
        for (double k : t.smile2.joins()) out.push_back(strike - k * w2);
    if (w1 > 0.0 && w2 > 0.0)
        for (double c : t.smile3.joins()) {
            // (z/w1) / ((K-z)/w2) = c
            const double z = c * w1 * strike / (w2 + c * w1);
            out.push_back(z);
        }
}

} // namespace

double basket_put_c3(const TriangleMarket& t, double w1, double w2, double strike, double tol) {
    if (w1 < 0.0 || w2 < 0.0 || (w1 == 0.0 && w2 == 0.0))
        throw std::invalid_argument("basket_put_c3: weights must be nonnegative, not both zero");
    if (!(strike > 0.0)) throw std::invalid_argument("basket_put_c3: strike must be positive");

    auto integrand = [&](double z) {
        const double k1 = w1 > 0.0 ? std::max(z, 1e-300) / w1 : kInf;
        const double k2 = w2 > 0.0 ? std::max(strike - z, 1e-300) / w2 : kInf;
        return best_of_u(t, k1, k2);
    };
    std::vector<double> breaks;
    add_join_breakpoints(t, w1, w2, strike, breaks);
    return strike * std::exp(-t.r3 * t.maturity) +
           math::integrate(integrand, 0.0, strike, breaks, tol);
}

double basket_put_c1(const TriangleMarket& t, double w1, double w2, double strike, double tol) {
    if (w1 < 0.0 || w2 < 0.0) throw std::invalid_argument("basket_put_c1: weights must be >= 0");
    if (!(strike > 0.0)) throw std::invalid_argument("basket_put_c1: strike must be positive");
    const double conv = 1.0 / t.spot1;  // S_{c3/c1}(0)

    if (w2 == 0.0) {
        // single-asset reduction: (K - w1 S_{c3/c1})_+ prices as a c3-market
        // call on pair 1 at strike w1/K
        const double k = w1 / strike;
        return conv * strike *
               black_call(t.f1, k, t.smile1.vol(k), t.maturity, std::exp(-t.r3 * t.maturity));
    }

    const double s1a = t.smile1.vol(t.f1);
    const double s2a = t.smile2.vol(t.f2);
    const double sq = std::sqrt(t.maturity);
    double u_max = t.f2 * std::exp(8.0 * s2a * sq);
    u_max = std::max(u_max, (strike * t.f1 * std::exp(8.0 * s1a * sq) - w1) / w2);
    // below u_min the integrand is bounded by P(S2 < u) < 1e-20, so the
    // truncation is harmless and keeps the deep corner (where quoted
    // wing vols can violate the triangle conditions) out of reach
    const double u_min = t.f2 * std::exp(-10.0 * s2a * sq);

    auto integrand = [&](double u) {
        return best_of_u(t, kInf, u) - best_of_u(t, (w2 * u + w1) / strike, u);
    };
    std::vector<double> breaks;
    for (double k : t.smile2.joins()) breaks.push_back(k);
    for (double k : t.smile1.joins()) breaks.push_back((k * strike - w1) / w2);
    for (double c : t.smile3.joins()) {
        // ((w2 u + w1)/K) / u = c  =>  u = w1 / (c K - w2)
        const double den = c * strike - w2;
        if (den > 0.0) breaks.push_back(w1 / den);
    }
    return conv * w2 * math::integrate(integrand, u_min, u_max, breaks, tol);
}

std::string density_to_csv(const DensityGrid& g) {
    std::string out = "K1\\K2";
    for (double k2 : g.k2) {
        out += ',';
        out += format_double(k2);
    }
    out += '\n';
    for (std::size_t i = 0; i < g.k1.size(); ++i) {
        out += format_double(g.k1[i]);
        for (std::size_t j = 0; j < g.k2.size(); ++j) {
            out += ',';
            out += format_double(g.d[i][j]);
        }
        out += '\n';
    }
    return out;
}

std::string density_metadata_json(const DensityGrid& g) {
    nlohmann::ordered_json j;
    j["r_quote_c3"] = g.r3;
    j["maturity"] = g.maturity;
    j["scaling"] = "D = exp(-r3*T) * K1^(-1/3) * K2^(-1/3) * rho(K1,K2;T) / E[S_c3/X(T)]";
    j["n_k1"] = g.k1.size();
    j["n_k2"] = g.k2.size();
    j["k1_range"] = {g.k1.front(), g.k1.back()};
    j["k2_range"] = {g.k2.front(), g.k2.back()};
    j["negative_cells"] = g.negative_count;
    j["min_density"] = g.min_density;
    j["min_density_at"] = {g.worst_k1, g.worst_k2};
    return j.dump(2) + "\n";
}

} // namespace fxip
