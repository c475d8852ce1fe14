#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fxip/math/cholesky.hpp"
#include "fxip/math/dogleg.hpp"
#include "fxip/math/normal.hpp"
#include "fxip/math/philox.hpp"
#include "fxip/math/roots.hpp"

using namespace fxip::math;

TEST_CASE("normal cdf basics") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-10));
    CHECK(normal_cdf(38.0) == 1.0);
}

TEST_CASE("normal quantile against reference values") {
    // reference: high-precision evaluations of the inverse error function
    CHECK(normal_ppf(1e-12) == doctest::Approx(-7.034483825301131).epsilon(1e-13));
    CHECK(normal_ppf(1e-6) == doctest::Approx(-4.753424308822899).epsilon(1e-13));
    CHECK(normal_ppf(0.025) == doctest::Approx(-1.9599639845400545).epsilon(1e-14));
    CHECK(normal_ppf(0.25) == doctest::Approx(-0.6744897501960817).epsilon(1e-14));
    CHECK(normal_ppf(0.5) == 0.0);
    CHECK(normal_ppf(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-14));
    CHECK(normal_ppf(1.0 - 1e-6) == doctest::Approx(4.753424308817087).epsilon(1e-13));
    CHECK_THROWS_AS(normal_ppf(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_ppf(1.0), std::domain_error);
}

TEST_CASE("normal quantile inverts the cdf") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(1e-10, 1.0 - 1e-10);
    for (int i = 0; i < 20000; ++i) {
        const double p = unif(gen);
        CHECK(normal_cdf(normal_ppf(p)) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("bivariate normal cdf against quadrature references") {
    struct Case {
        double x, y, rho, expected;
    };
    // reference: 30-digit 2-D quadrature of the bivariate density
    const Case cases[] = {
        {0.0, 0.0, 0.5, 0.333333333333333333},
        {1.0, -1.0, 0.35, 0.1502504876883611},
        {-0.5, 0.7, -0.8, 0.122310964251097387},
        {2.0, 2.0, 0.95, 0.970524219807907886},
        {-1.5, -2.5, 0.99, 0.00620966532577535524},
        {0.3, -0.2, -0.999, 0.0387279520028283803},
        {1.2, 0.4, 0.0, 0.580002577947086479},
        {-3.0, 3.0, 0.6, 0.00134989803107043215},
        {0.5, 0.5, -0.95, 0.382952084204398341},
        {4.0, -4.0, 0.93, 3.16712418331198745e-5},
    };
    for (const auto& c : cases)
        CHECK(bivariate_normal_cdf(c.x, c.y, c.rho) ==
              doctest::Approx(c.expected).epsilon(1e-13));
}

TEST_CASE("bivariate normal cdf degenerate and limit cases") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(bivariate_normal_cdf(0.7, inf, 0.4) == doctest::Approx(normal_cdf(0.7)).epsilon(1e-15));
    CHECK(bivariate_normal_cdf(inf, -0.3, -0.6) ==
          doctest::Approx(normal_cdf(-0.3)).epsilon(1e-15));
    CHECK(bivariate_normal_cdf(-inf, 0.3, 0.2) == 0.0);
    CHECK(bivariate_normal_cdf(0.4, 1.1, 1.0) ==
          doctest::Approx(normal_cdf(0.4)).epsilon(1e-15));
    CHECK(bivariate_normal_cdf(0.4, 1.1, -1.0) ==
          doctest::Approx(normal_cdf(0.4) - normal_cdf(-1.1)).epsilon(1e-14));
    // zero correlation factorizes
    CHECK(bivariate_normal_cdf(0.9, -1.7, 0.0) ==
          doctest::Approx(normal_cdf(0.9) * normal_cdf(-1.7)).epsilon(1e-14));
}

TEST_CASE("bivariate normal cdf symmetry and marginal-consistency properties") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), ur(-0.99, 0.99);
    for (int i = 0; i < 2000; ++i) {
        const double x = ux(gen), y = ux(gen), r = ur(gen);
        const double v = bivariate_normal_cdf(x, y, r);
        CHECK(v == doctest::Approx(bivariate_normal_cdf(y, x, r)).epsilon(1e-14));
        // P(X<=x) = P(X<=x, Y<=y) + P(X<=x, Y>y), the latter via negation
        const double split = v + bivariate_normal_cdf(x, -y, -r);
        CHECK(split == doctest::Approx(normal_cdf(x)).epsilon(1e-13));
    }
}

TEST_CASE("philox streams are reproducible and block-addressable") {
    Philox4x32 a(1234, 7), b(1234, 7), c(1234, 8);
    CHECK(a(0) == b(0));
    CHECK(a(5) == b(5));
    CHECK(a(0) != c(0));

    NormalStream s1(42, 3), s2(42, 3);
    for (int i = 0; i < 100; ++i) CHECK(s1.next_normal() == s2.next_normal());
}

TEST_CASE("philox uniforms look uniform and normals look normal") {
    NormalStream s(2024, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.next_normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cholesky matches the explicit lower-triangular recursion") {
    Matrix r(3);
    const double rho12 = 0.5, rho13 = 0.2, rho23 = -0.3;
    r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
    r(0, 1) = r(1, 0) = rho12;
    r(0, 2) = r(2, 0) = rho13;
    r(1, 2) = r(2, 1) = rho23;
    const Matrix l = cholesky_lower(r);
    // entry-by-entry against the written-out formulas
    CHECK(l(0, 0) == doctest::Approx(1.0));
    CHECK(l(1, 0) == doctest::Approx(rho12));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(1.0 - rho12 * rho12)));
    CHECK(l(2, 0) == doctest::Approx(rho13));
    CHECK(l(2, 1) == doctest::Approx((rho23 - rho12 * rho13) / std::sqrt(1.0 - rho12 * rho12)));
    // reconstruction L L^T = R
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += l(i, k) * l(j, k);
            CHECK(s == doctest::Approx(r(i, j)).epsilon(1e-14));
        }
}

TEST_CASE("cholesky rejects non positive definite input") {
    Matrix r(2);
    r(0, 0) = r(1, 1) = 1.0;
    r(0, 1) = r(1, 0) = 1.0 + 1e-9;
    CHECK_THROWS_AS(cholesky_lower(r), std::domain_error);
}

TEST_CASE("bracketed root finder") {
    auto f = [](double x) { return x * x * x - 2.0; };
    const double r = find_root_bracketed(f, 0.0, 3.0, 1e-14);
    CHECK(r == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(find_root_bracketed(f, 2.0, 3.0, 1e-14), std::domain_error);
}

TEST_CASE("dogleg solver on a coupled nonlinear system") {
    auto f = [](const std::vector<double>& x) -> std::optional<std::vector<double>> {
        return std::vector<double>{x[0] * x[0] + x[1] - 3.0, x[0] - std::exp(-x[1])};
    };
    const auto rep = DoglegSolver::solve(f, {1.0, 1.0});
    CHECK(rep.converged);
    CHECK(std::fabs(rep.residuals[0]) < 1e-10);
    CHECK(std::fabs(rep.residuals[1]) < 1e-10);
}

TEST_CASE("dogleg solver backs off from infeasible regions") {
    // feasible only for x > 0.1; root at x = 1
    auto f = [](const std::vector<double>& x) -> std::optional<std::vector<double>> {
        if (x[0] <= 0.1) return std::nullopt;
        return std::vector<double>{std::log(x[0])};
    };
    const auto rep = DoglegSolver::solve(f, {3.0});
    CHECK(rep.converged);
    CHECK(rep.x[0] == doctest::Approx(1.0).epsilon(1e-8));
}
