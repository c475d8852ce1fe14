#include "fxip/sabr.hpp"

#include <cmath>
#include <stdexcept>

#include "fxip/math/philox.hpp"
#include "fxip/parallel.hpp"

namespace fxip {

void SabrParams::validate() const {
    if (!(alpha0 > 0.0 && nu > 0.0))
        throw std::invalid_argument("SabrParams: alpha0 and nu must be positive");
    if (!(rho > -1.0 && rho <= 0.0))
        throw std::invalid_argument("SabrParams: rho must lie in (-1, 0]");
    if (!(f0 > 0.0 && maturity > 0.0))
        throw std::invalid_argument("SabrParams: f0 and maturity must be positive");
}

namespace {

template <bool Parallel>
SabrEnsemble simulate_impl(const SabrParams& p, const McControls& mc) {
    p.validate();
    mc.validate(p.maturity);
    const int n_steps =
        std::max(1, static_cast<int>(std::llround(p.maturity / std::min(mc.step, p.maturity))));
    const double h = p.maturity / n_steps;
    const double sqrt_h = std::sqrt(h);
    const double rho_perp = std::sqrt(1.0 - p.rho * p.rho);
    const double drift = 0.5 * (p.r_quote - p.r_base) * h;   // exact: r_X cancels sigma^2/8

    SabrEnsemble e;
    e.antithetic = mc.antithetic;
    e.sqrt_f.resize(mc.n_paths);
    e.inv_sqrt_f.resize(mc.n_paths);
    e.discount.resize(mc.n_paths);
    e.sigma_T.resize(mc.n_paths);

#pragma omp parallel for schedule(static) num_threads(worker_count()) if (Parallel)
    for (std::int64_t i = 0; i < mc.n_paths; ++i) {
        const std::uint64_t stream = mc.antithetic ? static_cast<std::uint64_t>(i / 2)
                                                   : static_cast<std::uint64_t>(i);
        const double sign = (mc.antithetic && (i % 2)) ? -1.0 : 1.0;
        math::NormalStream rng(mc.seed, stream);
        double ln_sqrt_f = 0.5 * std::log(p.f0);
        double sigma = p.alpha0;
        double var_integral = 0.0;     // trapezoid on sigma^2
        for (int n = 0; n < n_steps; ++n) {
            const double z_sigma = sign * rng.next_normal();
            const double z_perp = sign * rng.next_normal();
            const double z_f = p.rho * z_sigma + rho_perp * z_perp;
            ln_sqrt_f += drift + 0.5 * sigma * sqrt_h * z_f;
            const double sigma_next =
                sigma * std::exp(-0.5 * p.nu * p.nu * h + p.nu * sqrt_h * z_sigma);
            var_integral += 0.5 * (sigma * sigma + sigma_next * sigma_next) * h;
            sigma = sigma_next;
        }
        const double sq = std::exp(ln_sqrt_f);
        e.sqrt_f[i] = sq;
        e.inv_sqrt_f[i] = 1.0 / sq;
        e.discount[i] =
            std::exp(-0.5 * (p.r_quote + p.r_base) * p.maturity - var_integral / 8.0);
        e.sigma_T[i] = sigma;
    }
    return e;
}

McPrice mean_with_se(const std::vector<double>& w, double scale) {
    const std::size_t n = w.size();
    double s = 0.0;
    for (double x : w) s += x;
    const double m = s / n;
    double var = 0.0;
    for (double x : w) var += (x - m) * (x - m);
    var /= (n - 1);
    return {scale * m, scale * std::sqrt(var / n)};
}

template <typename Payoff>
McPrice discounted_mean(const SabrEnsemble& e, double scale, Payoff payoff) {
    std::vector<double> w(e.sqrt_f.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = e.discount[i] * payoff(e.sqrt_f[i], e.inv_sqrt_f[i]);
    if (e.antithetic) {
        std::vector<double> folded(w.size() / 2);
        for (std::size_t i = 0; i < folded.size(); ++i)
            folded[i] = 0.5 * (w[2 * i] + w[2 * i + 1]);
        return mean_with_se(folded, scale);
    }
    return mean_with_se(w, scale);
}

} // namespace

SabrEnsemble simulate_sabr(const SabrParams& p, const McControls& mc) {
    return simulate_impl<true>(p, mc);
}

SabrEnsemble simulate_sabr_serial(const SabrParams& p, const McControls& mc) {
    return simulate_impl<false>(p, mc);
}

McPrice sabr_call_quote(const SabrParams& p, const SabrEnsemble& e, double strike) {
    return discounted_mean(e, std::sqrt(p.f0), [strike](double sq, double isq) {
        return std::max(sq - strike * isq, 0.0);
    });
}

McPrice sabr_put_quote(const SabrParams& p, const SabrEnsemble& e, double strike) {
    return discounted_mean(e, std::sqrt(p.f0), [strike](double sq, double isq) {
        return std::max(strike * isq - sq, 0.0);
    });
}

McPrice sabr_call_base(const SabrParams& p, const SabrEnsemble& e, double strike) {
    return discounted_mean(e, 1.0 / std::sqrt(p.f0), [strike](double sq, double isq) {
        return std::max(isq - strike * sq, 0.0);
    });
}

McPrice sabr_put_base(const SabrParams& p, const SabrEnsemble& e, double strike) {
    return discounted_mean(e, 1.0 / std::sqrt(p.f0), [strike](double sq, double isq) {
        return std::max(strike * sq - isq, 0.0);
    });
}

McPrice sabr_call_quote(const SabrParams& p, double strike, const McControls& mc) {
    return sabr_call_quote(p, simulate_sabr(p, mc), strike);
}

} // namespace fxip
