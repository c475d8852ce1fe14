#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fxip/gk.hpp"
#include "fxip/math/integrate.hpp"
#include "fxip/math/normal.hpp"
#include "fxip/math/philox.hpp"
#include "fxip/model_free.hpp"

using namespace fxip;
using math::normal_cdf;
using math::normal_pdf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MarketSnapshot table1() {
    return load_snapshot(std::string(FXIP_SOURCE_DIR) + "/data/table1_market.json");
}

TriangleMarket table1_triangle() {
    return TriangleMarket::from_snapshot(table1(), Currency("GBP"), Currency("USD"),
                                         Currency("EUR"));
}

// flat smiles with implied cross vol from a chosen correlation
TriangleMarket flat_triangle(double sa, double sb, double rho, double f1 = 1.2903,
                             double f2 = 0.8946) {
    const double sc = std::sqrt(sa * sa - 2.0 * rho * sa * sb + sb * sb);
    auto curve = [](double f, double v) {
        return SmileCurve({0.8 * f, f, 1.25 * f}, {v, v, v}, 1.0);
    };
    TriangleMarket t{curve(f1, sa), curve(f2, sb), curve(f1 / f2, sc)};
    t.f1 = f1;
    t.f2 = f2;
    t.f3 = f1 / f2;
    t.spot1 = f1 * std::exp(0.0025);   // r1 = 0.0025, r3 = 0
    t.r1 = 0.0025;
    t.r2 = 0.0025;
    t.r3 = 0.0;
    t.maturity = 1.0;
    return t;
}

struct LognormalPaths {
    std::vector<double> s1, s2;
};

LognormalPaths joint_lognormal(const TriangleMarket& t, double sa, double sb, double rho,
                               std::size_t n, std::uint64_t seed) {
    LognormalPaths out;
    out.s1.resize(n);
    out.s2.resize(n);
    math::NormalStream rng(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = rng.next_normal();
        const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * rng.next_normal();
        out.s1[i] = t.f1 * std::exp(-0.5 * sa * sa + sa * z1);
        out.s2[i] = t.f2 * std::exp(-0.5 * sb * sb + sb * z2);
    }
    return out;
}

double gk_put_on(double forward, double strike, double sigma, double maturity, double df) {
    const double sq = sigma * std::sqrt(maturity);
    const double dp = (std::log(forward / strike) + 0.5 * sigma * sigma * maturity) / sq;
    return df * (strike * normal_cdf(-(dp - sq)) - forward * normal_cdf(-dp));
}

} // namespace

TEST_CASE("smile curve interpolates its anchors") {
    const auto snap = table1();
    for (const auto& q : snap.pairs) {
        const auto s = SmileCurve::from_quote(q);
        CHECK(s.vol(strike_from_delta(q, SmileTag::Put25)) ==
              doctest::Approx(q.vol_put25).epsilon(1e-12));
        CHECK(s.vol(strike_from_delta(q, SmileTag::Atm)) ==
              doctest::Approx(q.vol_atm).epsilon(1e-12));
        CHECK(s.vol(strike_from_delta(q, SmileTag::Call25)) ==
              doctest::Approx(q.vol_call25).epsilon(1e-12));
    }
}

TEST_CASE("smile wings flatten and satisfy the asymptotic growth bound") {
    const auto q = table1().find_pair(Currency("GBP"), Currency("EUR"));
    const auto s = SmileCurve::from_quote(q);
    // far-field vol is constant
    CHECK(s.vol(1e5) == doctest::Approx(s.vol(1e6)).epsilon(1e-6));
    CHECK(s.dvol_dk(1e5) == doctest::Approx(0.0).epsilon(1e-12));
    // sigma^2(K) / |log K| -> 0
    for (double k : {1e-6, 1e6}) {
        const double v = s.vol(k);
        CHECK(v * v / std::fabs(std::log(k)) < 0.01);
    }
}

TEST_CASE("smile slope matches a finite difference everywhere") {
    const auto q = table1().find_pair(Currency("USD"), Currency("EUR"));
    const auto s = SmileCurve::from_quote(q);
    for (double k = 0.5; k < 1.6; k += 0.021) {
        const double h = 1e-6 * k;
        const double fd = (s.vol(k + h) - s.vol(k - h)) / (2.0 * h);
        CHECK(s.dvol_dk(k) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("smile curve rejects degenerate input") {
    CHECK_THROWS(SmileCurve({1.0, 0.9, 1.2}, {0.1, 0.1, 0.1}, 1.0));
    CHECK_THROWS(SmileCurve({0.9, 1.0, 1.1}, {0.1, -0.1, 0.1}, 1.0));
}

TEST_CASE("triangle market pins the cross forward") {
    const auto t = table1_triangle();
    CHECK(t.f3 == doctest::Approx(t.f1 / t.f2).epsilon(1e-15));
    CHECK(t.f1 == doctest::Approx(1.2935 * std::exp(-0.0025)).epsilon(1e-14));
    CHECK(t.r1 == 0.0025);
    CHECK(t.r3 == 0.0);
    // the quoted cross spot 1.4423 is within a few pips of f1/f2
    CHECK(t.f3 == doctest::Approx(1.4423).epsilon(1e-4));
}

TEST_CASE("triangle conditions hold on a 50x50 grid of the quoted data") {
    const auto t = table1_triangle();
    const auto k1s = make_strike_grid(t.f1, 0.10945, 1.0, 50, 2.0);
    const auto k2s = make_strike_grid(t.f2, 0.09250, 1.0, 50, 2.0);
    for (double k1 : k1s)
        for (double k2 : k2s) {
            CHECK(t.triangle_ok(k1, k2));
            CHECK(std::fabs(t.rho12(k1, k2)) < 1.0);
        }
}

TEST_CASE("single-pair density matches the lognormal law for a flat smile") {
    const double f = 1.2903, v = 0.11, tt = 1.0, r = 0.0025;
    const SmileCurve flat({0.8 * f, f, 1.25 * f}, {v, v, v}, tt);
    for (double k = 0.9; k < 1.7; k += 0.1) {
        const double d = single_pair_density(flat, f, r, tt, k);
        const double z = (std::log(k / f) + 0.5 * v * v * tt) / (v * std::sqrt(tt));
        const double pdf = normal_pdf(z) / (k * v * std::sqrt(tt));
        CHECK(d == doctest::Approx(std::exp(-r * tt) * pdf).epsilon(1e-6));
    }
    CHECK_THROWS_AS(single_pair_density(flat, f, r, tt, -1.0), std::domain_error);
}

TEST_CASE("single-pair density integrates to the call-slope difference") {
    const auto q = table1().find_pair(Currency("USD"), Currency("EUR"));
    const auto s = SmileCurve::from_quote(q);
    const double f = forward_rate(q);
    auto call = [&](double k) {
        GkInputs in;
        in.f0 = q.spot;
        in.strike = k;
        in.maturity = q.maturity;
        in.sigma = s.vol(k);
        in.r_quote = q.r_quote;
        in.r_base = q.r_base;
        return gk_call(in);
    };
    const double a = 0.8 * f, b = 1.2 * f;
    const double mass = math::integrate(
        [&](double k) { return single_pair_density(s, f, q.r_quote, q.maturity, k); }, a, b,
        {s.k_min(), s.k_max()}, 1e-10);
    const double h = 1e-5;
    const double slope_diff =
        (call(b + h) - call(b - h)) / (2 * h) - (call(a + h) - call(a - h)) / (2 * h);
    CHECK(mass == doctest::Approx(slope_diff).epsilon(1e-6));
}

TEST_CASE("single-pair density is positive across the quoted smile") {
    const auto q = table1().find_pair(Currency("USD"), Currency("EUR"));
    const auto s = SmileCurve::from_quote(q);
    const double f = forward_rate(q);
    for (double k = s.k_min(); k <= s.k_max(); k += (s.k_max() - s.k_min()) / 60.0)
        CHECK(single_pair_density(s, f, q.r_quote, q.maturity, k) > 0.0);
}

TEST_CASE("best-of value agrees with a joint lognormal Monte Carlo") {
    const double sa = 0.11, sb = 0.095, rho = 0.55;
    const auto t = flat_triangle(sa, sb, rho);
    const std::size_t n = 8'000'000;
    const auto paths = joint_lognormal(t, sa, sb, rho, n, 1);
    for (auto [k1, k2] : {std::pair{1.25, 0.91}, {1.29, 0.89}, {1.15, 0.95}, {1.4, 0.85}}) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pay = std::max(std::max(paths.s1[i] - k1, 0.0) / k1,
                                        std::max(paths.s2[i] - k2, 0.0) / k2);
            sum += pay;
            sum2 += pay * pay;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / n);
        CHECK(std::fabs(best_of_value(t, k1, k2) - mean) < 3.0 * se);
    }
}

TEST_CASE("best-of value is symmetric under leg exchange") {
    const auto t = flat_triangle(0.1, 0.1, 0.4, 1.0, 1.0);
    CHECK(best_of_value(t, 1.05, 0.97) ==
          doctest::Approx(best_of_value(t, 0.97, 1.05)).epsilon(1e-13));
}

TEST_CASE("best-of degenerates to a single call when one leg is far out") {
    const double sa = 0.11, sb = 0.095, rho = 0.55;
    const auto t = flat_triangle(sa, sb, rho);
    const double k2 = 0.9;
    const double single = [&] {
        const double sq = sb;
        const double dp = (std::log(t.f2 / k2) + 0.5 * sq * sq) / sq;
        return std::exp(-t.r3) * (t.f2 * normal_cdf(dp) - k2 * normal_cdf(dp - sq)) / k2;
    }();
    CHECK(best_of_value(t, 60.0, k2) == doctest::Approx(single).epsilon(1e-9));
}

TEST_CASE("best-of rejects inconsistent smile triples") {
    // cross vol far above sa + sb
    auto curve = [](double f, double v) {
        return SmileCurve({0.8 * f, f, 1.25 * f}, {v, v, v}, 1.0);
    };
    TriangleMarket t{curve(1.29, 0.05), curve(0.89, 0.05), curve(1.29 / 0.89, 0.30)};
    t.f1 = 1.29;
    t.f2 = 0.89;
    t.f3 = t.f1 / t.f2;
    t.spot1 = 1.29;
    t.maturity = 1.0;
    CHECK_THROWS_AS(best_of_value(t, 1.29, 0.89), inconsistent_smiles);
    CHECK_THROWS_AS(best_of_u(t, 1.29, 0.89), inconsistent_smiles);
}

TEST_CASE("U reduces to the no-slope form for flat smiles") {
    const double sa = 0.11, sb = 0.095, rho = 0.55;
    const auto t = flat_triangle(sa, sb, rho);
    const double k1 = 1.25, k2 = 0.91;
    const double d1m = (std::log(t.f1 / k1) + 0.5 * sa * sa) / sa - sa;
    const double d2m = (std::log(t.f2 / k2) + 0.5 * sb * sb) / sb - sb;
    const double expected =
        std::exp(-t.r3) * (math::bivariate_normal_cdf(-d1m, -d2m, rho) - 1.0);
    CHECK(best_of_u(t, k1, k2) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("U matches the strike-differentiation of the best-of value at order 2") {
    const auto t = table1_triangle();
    auto u_fd = [&](double k1, double k2, double h) {
        const double d1 =
            (best_of_value(t, k1 * (1 + h), k2) - best_of_value(t, k1 * (1 - h), k2)) /
            (2 * h * k1);
        const double d2 =
            (best_of_value(t, k1, k2 * (1 + h)) - best_of_value(t, k1, k2 * (1 - h))) /
            (2 * h * k2);
        return best_of_value(t, k1, k2) + k1 * d1 + k2 * d2;
    };
    for (auto [k1, k2] : {std::pair{1.29, 0.89}, {1.21, 0.86}, {1.36, 0.93}, {1.27, 0.92}}) {
        const double u = best_of_u(t, k1, k2);
        const double e1 = std::fabs(u_fd(k1, k2, 2e-3) - u);
        const double e2 = std::fabs(u_fd(k1, k2, 1e-3) - u);
        const double order = std::log2(e1 / e2);
        CHECK(order >= 1.9);
    }
}

TEST_CASE("U tail formulas are the large-strike limits") {
    const auto t = table1_triangle();
    CHECK(best_of_u(t, kInf, 0.9) == doctest::Approx(best_of_u(t, 1e8, 0.9)).epsilon(1e-10));
    CHECK(best_of_u(t, 1.3, kInf) == doctest::Approx(best_of_u(t, 1.3, 1e8)).epsilon(1e-10));
    CHECK(best_of_u(t, kInf, kInf) == 0.0);
}

TEST_CASE("density grid: serial and parallel agree exactly") {
    const auto t = table1_triangle();
    const auto k1s = make_strike_grid(t.f1, 0.10945, 1.0, 24, 1.0);
    const auto k2s = make_strike_grid(t.f2, 0.0925, 1.0, 24, 1.0);
    const auto a = scaled_joint_density(t, k1s, k2s);
    const auto b = scaled_joint_density_serial(t, k1s, k2s);
    CHECK(a.d == b.d);
    CHECK(a.u == b.u);
    CHECK(a.negative_count == b.negative_count);
}

TEST_CASE("density grid reproduces the joint lognormal for flat smiles") {
    const double sa = 0.11, sb = 0.095, rho = 0.55;
    const auto t = flat_triangle(sa, sb, rho);
    const auto k1s = make_strike_grid(t.f1, sa, 1.0, 16, 1.5);
    const auto k2s = make_strike_grid(t.f2, sb, 1.0, 16, 1.5);
    const auto g = scaled_joint_density(t, k1s, k2s);
    for (std::size_t i = 0; i < k1s.size(); i += 3)
        for (std::size_t j = 0; j < k2s.size(); j += 3) {
            const double x = k1s[i], y = k2s[j];
            const double lx = (std::log(x / t.f1) + 0.5 * sa * sa) / sa;
            const double ly = (std::log(y / t.f2) + 0.5 * sb * sb) / sb;
            const double z = (lx * lx - 2 * rho * lx * ly + ly * ly) / (1 - rho * rho);
            const double pdf = std::exp(-0.5 * z) /
                               (2 * M_PI * std::sqrt(1 - rho * rho) * sa * sb * x * y);
            CHECK(g.d[i][j] == doctest::Approx(std::exp(-t.r3) * pdf).epsilon(2e-5));
        }
    CHECK(g.negative_count == 0);
}

TEST_CASE("flat-smile density mass matches the pseudo-leg normalization") {
    // integral of D K1^{1/3} K2^{1/3} over a wide grid approximates
    // e^{-r3 T} / E[S1^{-1/3} S2^{-1/3}]
    const double sa = 0.11, sb = 0.095, rho = 0.55;
    const auto t = flat_triangle(sa, sb, rho);
    const int n = 160;
    const auto k1s = make_strike_grid(t.f1, sa, 1.0, n, 6.0);
    const auto k2s = make_strike_grid(t.f2, sb, 1.0, n, 6.0);
    const auto g = scaled_joint_density(t, k1s, k2s);
    double mass = 0.0;
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            const double cell = (k1s[i + 1] - k1s[i]) * (k2s[j + 1] - k2s[j]);
            const double val = 0.25 *
                (g.d[i][j] * std::cbrt(k1s[i] * k2s[j]) +
                 g.d[i + 1][j] * std::cbrt(k1s[i + 1] * k2s[j]) +
                 g.d[i][j + 1] * std::cbrt(k1s[i] * k2s[j + 1]) +
                 g.d[i + 1][j + 1] * std::cbrt(k1s[i + 1] * k2s[j + 1]));
            mass += cell * val;
        }
    // 1/E[S_c3/X] = E[(S1 S2)^{1/3}] under the c3 forward measure, where
    // both legs are martingale lognormals
    const double a = 1.0 / 3.0;
    const double e_cube = std::pow(t.f1, a) * std::pow(t.f2, a) *
                          std::exp(0.5 * a * (a - 1) * (sa * sa + sb * sb) +
                                   a * a * rho * sa * sb);
    CHECK(mass == doctest::Approx(std::exp(-t.r3) * e_cube).epsilon(2e-3));
}

TEST_CASE("quoted-data density grid records its diagnostics") {
    const auto t = table1_triangle();
    const auto k1s = make_strike_grid(t.f1, 0.10945, 1.0, 40, 2.0);
    const auto k2s = make_strike_grid(t.f2, 0.0925, 1.0, 40, 2.0);
    const auto g = scaled_joint_density(t, k1s, k2s);
    CHECK(std::isfinite(g.min_density));
    if (g.negative_count > 0) CHECK(g.min_density < 0.0);
    CHECK(g.worst_k1 >= k1s.front());
    CHECK(g.worst_k1 <= k1s.back());
}

TEST_CASE("basket put reduces to the vanilla put when one weight vanishes") {
    const auto t = table1_triangle();
    // weight one: exact GK put at the same strike with the smile vol
    for (double k : {1.2, 1.2935, 1.36}) {
        const double basket = basket_put_c3(t, 1.0, 0.0, k);
        const double ref = gk_put_on(t.f1, k, t.smile1.vol(k), 1.0, std::exp(-t.r3));
        CHECK(basket == doctest::Approx(ref).epsilon(1e-8));
    }
    // general weight scales the strike
    const double basket = basket_put_c3(t, 0.5, 0.0, 0.64);
    const double ref = 0.5 * gk_put_on(t.f1, 1.28, t.smile1.vol(1.28), 1.0, std::exp(-t.r3));
    CHECK(basket == doctest::Approx(ref).epsilon(1e-8));
    // leg-two only
    const double b2 = basket_put_c3(t, 0.0, 1.0, 0.88);
    const double ref2 = gk_put_on(t.f2, 0.88, t.smile2.vol(0.88), 1.0, std::exp(-t.r3));
    CHECK(b2 == doctest::Approx(ref2).epsilon(1e-8));
}

TEST_CASE("basket put vanishes with the strike") {
    const auto t = flat_triangle(0.11, 0.095, 0.55);
    CHECK(std::fabs(basket_put_c3(t, 0.5, 0.5, 1e-4)) < 1e-7);
}

TEST_CASE("basket puts agree with a joint lognormal Monte Carlo for flat smiles") {
    const double sa = 0.11, sb = 0.095, rho = 0.55;
    const auto t = flat_triangle(sa, sb, rho);
    const std::size_t n = 8'000'000;
    const auto paths = joint_lognormal(t, sa, sb, rho, n, 3);

    {
        const double w1 = 0.45, w2 = 0.65, k = 1.17;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pay = std::max(k - w1 * paths.s1[i] - w2 * paths.s2[i], 0.0);
            sum += pay;
            sum2 += pay * pay;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / n);
        CHECK(std::fabs(basket_put_c3(t, w1, w2, k) - mean) < 3.0 * se);
    }
    {
        const double w1 = 0.6, w2 = 0.7, k = 1.0;
        const double conv = 1.0 / t.spot1;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pay = std::max(k * paths.s1[i] - w1 - w2 * paths.s2[i], 0.0);
            sum += pay;
            sum2 += pay * pay;
        }
        const double mean = conv * sum / n;
        const double se = conv * std::sqrt((sum2 / n - sum / n * (sum / n)) / n);
        CHECK(std::fabs(basket_put_c1(t, w1, w2, k) - mean) < 3.0 * se);
    }
}

TEST_CASE("cross-market basket price is consistent with the density surface") {
    // route 1: the semi-infinite U integral; route 2: direct integration of
    // the payoff against the grid density
    const double sa = 0.11, sb = 0.095, rho = 0.55;
    const auto t = flat_triangle(sa, sb, rho);
    const double w1 = 0.6, w2 = 0.7, k = 1.0;
    const double route1 = basket_put_c1(t, w1, w2, k);

    const int n = 220;
    const auto k1s = make_strike_grid(t.f1, sa, 1.0, n, 6.0);
    const auto k2s = make_strike_grid(t.f2, sb, 1.0, n, 6.0);
    const auto g = scaled_joint_density(t, k1s, k2s);
    // D is the discounted c3-forward-measure density, so the payoff
    // integrates against it directly
    double integral = 0.0;
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            auto pay = [&](double x, double y) { return std::max(k * x - w1 - w2 * y, 0.0); };
            const double cell = (k1s[i + 1] - k1s[i]) * (k2s[j + 1] - k2s[j]);
            integral += 0.25 * cell *
                        (g.d[i][j] * pay(k1s[i], k2s[j]) +
                         g.d[i + 1][j] * pay(k1s[i + 1], k2s[j]) +
                         g.d[i][j + 1] * pay(k1s[i], k2s[j + 1]) +
                         g.d[i + 1][j + 1] * pay(k1s[i + 1], k2s[j + 1]));
        }
    const double direct = (1.0 / t.spot1) * integral;
    CHECK(route1 == doctest::Approx(direct).epsilon(5e-3));
}

TEST_CASE("density csv and metadata serialization") {
    const auto t = flat_triangle(0.1, 0.09, 0.3);
    const auto g = scaled_joint_density(t, {1.2, 1.3, 1.4}, {0.85, 0.9}, 1e-4);
    const std::string csv = density_to_csv(g);
    CHECK(csv.substr(0, 6) == "K1\\K2,");
    // 1 header + 3 rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    const std::string meta = density_metadata_json(g);
    CHECK(meta.find("\"negative_cells\"") != std::string::npos);
    CHECK(meta.find("\"scaling\"") != std::string::npos);
}
