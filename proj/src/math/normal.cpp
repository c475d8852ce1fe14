#include "fxip/math/normal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fxip::math {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kTwoPi = 6.2831853071795864769252867665590;
} // namespace

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_ppf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_ppf: p must lie in (0,1)");

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }

    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -v : v;
}

namespace {

// Gauss-Legendre nodes/weights on (-1,1), positive half.
constexpr double kX6[3] = {0.9324695142031521, 0.6612093864662645, 0.2386191860831969};
constexpr double kW6[3] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910};
constexpr double kX12[6] = {0.9815606342467192, 0.9041172563704749, 0.7699026741943047,
                            0.5873179542866175, 0.3678314989981802, 0.1252334085114689};
constexpr double kW12[6] = {0.04717533638651183, 0.1069393259953184, 0.1600783285433462,
                            0.2031674267230659,  0.2334925365383548, 0.2491470458134028};
constexpr double kX20[10] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                             0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                             0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                             0.07652652113349733};
constexpr double kW20[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                             0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                             0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                             0.1527533871307259};

} // namespace

double bivariate_normal_cdf(double x, double y, double rho) {
    if (std::isnan(x) || std::isnan(y))
        return std::numeric_limits<double>::quiet_NaN();
    if (x == -std::numeric_limits<double>::infinity() ||
        y == -std::numeric_limits<double>::infinity())
        return 0.0;
    if (x == std::numeric_limits<double>::infinity())
        return normal_cdf(y);
    if (y == std::numeric_limits<double>::infinity())
        return normal_cdf(x);
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::domain_error("bivariate_normal_cdf: |rho| must be <= 1");
    if (rho == 1.0)
        return normal_cdf(std::min(x, y));
    if (rho == -1.0)
        return std::max(0.0, normal_cdf(x) - normal_cdf(-y));

    // Genz's BVND computes P(X > h, Y > k); flip signs.
    double h = -x;
    double k = -y;
    double hk = h * k;
    double bvn = 0.0;

    const double* gx;
    const double* gw;
    int ng;
    if (std::fabs(rho) < 0.3) {
        gx = kX6; gw = kW6; ng = 3;
    } else if (std::fabs(rho) < 0.75) {
        gx = kX12; gw = kW12; ng = 6;
    } else {
        gx = kX20; gw = kW20; ng = 10;
    }

    if (std::fabs(rho) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(rho);
        for (int i = 0; i < ng; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                const double sn = std::sin(asr * (is * gx[i] + 1.0) / 2.0);
                bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / (2.0 * kTwoPi) + normal_cdf(-h) * normal_cdf(-k);
    } else {
        if (rho < 0.0) {
            k = -k;
            hk = -hk;
        }
        if (std::fabs(rho) < 1.0) {
            const double as = (1.0 - rho) * (1.0 + rho);
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 16.0;
            double asr = -(bs / as + hk) / 2.0;
            if (asr > -100.0)
                bvn = a * std::exp(asr) *
                      (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
            if (-hk < 100.0) {
                const double b = std::sqrt(bs);
                bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * normal_cdf(-b / a) * b *
                       (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a /= 2.0;
            for (int i = 0; i < ng; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double xs = (a * (is * gx[i] + 1.0)) * (a * (is * gx[i] + 1.0));
                    const double rs = std::sqrt(1.0 - xs);
                    asr = -(bs / xs + hk) / 2.0;
                    if (asr > -100.0) {
                        const double sp = 1.0 + c * xs * (1.0 + d * xs);
                        const double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
                        bvn += a * gw[i] * std::exp(asr) * (ep - sp);
                    }
                }
            }
            bvn = -bvn / kTwoPi;
        }
        if (rho > 0.0) {
            bvn += normal_cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h)
                bvn += normal_cdf(k) - normal_cdf(h);
        }
    }
    return std::min(1.0, std::max(0.0, bvn));
}

} // namespace fxip::math
