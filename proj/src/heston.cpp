#include "fxip/heston.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fxip/math/philox.hpp"
#include "fxip/parallel.hpp"

namespace fxip {

double HestonParams::beta() const { return std::sqrt(kappa * kappa + 0.25 * delta * delta); }

void HestonParams::validate() const {
    if (!(v0 > 0.0 && kappa > 0.0 && theta > 0.0 && delta > 0.0))
        throw std::invalid_argument("HestonParams: v0, kappa, theta, delta must be positive");
    if (!(rho > -1.0 && rho < 1.0))
        throw std::invalid_argument("HestonParams: rho must lie in (-1,1)");
    if (!(f0 > 0.0 && maturity > 0.0))
        throw std::invalid_argument("HestonParams: f0 and maturity must be positive");
    // C is increasing in tau, so the constraint binds at tau = T.
    if (!(kappa / (delta * delta) > affine_AC(*this, maturity).c))
        throw std::invalid_argument("HestonParams: kappa/delta^2 must exceed C(T)");
}

void McControls::validate(double maturity) const {
    if (n_paths < 2) throw std::invalid_argument("McControls: need at least 2 paths");
    if (!(step > 0.0 && step <= maturity))
        throw std::invalid_argument("McControls: step must lie in (0, T]");
    if (antithetic && (n_paths % 2) != 0)
        throw std::invalid_argument("McControls: antithetic sampling needs an even path count");
}

AffineAC affine_AC(const HestonParams& p, double tau) {
    if (tau < 0.0) throw std::invalid_argument("affine_AC: tau must be >= 0");
    const double b = p.beta();
    const double em1 = std::expm1(b * tau);
    const double den = (b + p.kappa) * em1 + 2.0 * b;
    AffineAC out;
    out.c = 0.25 * em1 / den;
    out.a = (2.0 * p.kappa * p.theta / (p.delta * p.delta)) *
            std::log(2.0 * b * std::exp(0.5 * (b + p.kappa) * tau) / den);
    return out;
}

double bond_price(const HestonParams& p, double t, double v_t) {
    if (!(t >= 0.0 && t <= p.maturity))
        throw std::invalid_argument("bond_price: t must lie in [0, T]");
    if (v_t < 0.0) throw std::invalid_argument("bond_price: v_t must be >= 0");
    const double tau = p.maturity - t;
    const auto ac = affine_AC(p, tau);
    return std::exp(-0.5 * (p.r_quote + p.r_base) * tau + ac.a - ac.c * v_t);
}

namespace {

struct StepCoef {
    double c11, c12, c22;       // diffusion loadings on (z1, z2), times sqrt(v h)
    double half_var1, half_var2; // 0.5 * variance / v, times h
    double ekt;                  // exp(-kappa_t h)
    double theta_t;              // kappa theta / kappa_t
    double var_v1, var_v2;       // conditional-variance pieces: v-prop and const
};

struct Grid {
    std::vector<StepCoef> steps;
    double sqrt_h = 0.0;
};

Grid make_grid(const HestonParams& p, double h_req) {
    const double h = std::min(h_req, p.maturity);
    const int n_steps = std::max(1, static_cast<int>(std::llround(p.maturity / h)));
    const double h_eff = p.maturity / n_steps;
    Grid g;
    g.sqrt_h = std::sqrt(h_eff);
    g.steps.resize(n_steps);
    const double d = p.delta;
    for (int n = 0; n < n_steps; ++n) {
        const double t = n * h_eff;
        const double ct = affine_AC(p, p.maturity - t).c;     // left endpoint
        const double kt = p.kappa - ct * d * d;               // positive by hes10
        StepCoef& s = g.steps[n];
        s.c11 = 0.5 * std::sqrt(1.0 - p.rho * p.rho);
        s.c12 = 0.5 * p.rho + d * ct;
        s.c22 = -0.5 * p.rho + d * ct;
        s.half_var1 = 0.5 * (0.25 + p.rho * d * ct + d * d * ct * ct) * h_eff;
        s.half_var2 = 0.5 * (0.25 - p.rho * d * ct + d * d * ct * ct) * h_eff;
        s.ekt = std::exp(-kt * h_eff);
        s.theta_t = p.kappa * p.theta / kt;
        s.var_v1 = (d * d / kt) * (s.ekt - s.ekt * s.ekt);
        s.var_v2 = s.theta_t * (d * d / (2.0 * kt)) * (1.0 - s.ekt) * (1.0 - s.ekt);
    }
    return g;
}

// One path of the log-Euler forwards with the moment-matched lognormal
// variance step; z-draws come from the path's own counter-based stream.
inline void run_path(const HestonParams& p, const Grid& g, math::NormalStream& rng, double sign,
                     double x1_0, double x2_0, double& out1, double& out2, double& out_v,
                     double& vmin) {
    double x1 = x1_0, x2 = x2_0, v = p.v0;
    for (const StepCoef& s : g.steps) {
        const double z1 = sign * rng.next_normal();
        const double z2 = sign * rng.next_normal();
        const double sv = std::sqrt(v) * g.sqrt_h;
        x1 += -s.half_var1 * v + sv * (s.c11 * z1 + s.c12 * z2);
        x2 += -s.half_var2 * v + sv * (-s.c11 * z1 + s.c22 * z2);
        const double m = s.theta_t + (v - s.theta_t) * s.ekt;
        const double s2 = v * s.var_v1 + s.var_v2;
        const double g2 = std::log1p(s2 / (m * m));
        v = m * std::exp(-0.5 * g2 + std::sqrt(g2) * z2);
        vmin = std::min(vmin, v);
    }
    out1 = std::exp(x1);
    out2 = std::exp(x2);
    out_v = v;
}

template <bool Parallel>
ForwardEnsemble simulate_impl(const HestonParams& p, const McControls& mc) {
    p.validate();
    mc.validate(p.maturity);
    const Grid g = make_grid(p, mc.step);

    ForwardEnsemble e;
    e.antithetic = mc.antithetic;
    const double px = bond_price(p, 0.0, p.v0);
    e.base_leg0 = std::exp(-p.r_base * p.maturity) * std::sqrt(p.f0) / px;
    e.quote_leg0 = std::exp(-p.r_quote * p.maturity) / (px * std::sqrt(p.f0));
    e.base_leg.resize(mc.n_paths);
    e.quote_leg.resize(mc.n_paths);
    e.variance_T.resize(mc.n_paths);
    const double x1_0 = std::log(e.base_leg0);
    const double x2_0 = std::log(e.quote_leg0);

    std::vector<double> vmins(Parallel ? worker_count() : 1, p.v0);

#pragma omp parallel for schedule(static) num_threads(worker_count()) if (Parallel)
    for (std::int64_t i = 0; i < mc.n_paths; ++i) {
        const std::uint64_t stream = mc.antithetic ? static_cast<std::uint64_t>(i / 2)
                                                   : static_cast<std::uint64_t>(i);
        const double sign = (mc.antithetic && (i % 2)) ? -1.0 : 1.0;
        math::NormalStream rng(mc.seed, stream);
        double vmin = p.v0;
        run_path(p, g, rng, sign, x1_0, x2_0, e.base_leg[i], e.quote_leg[i], e.variance_T[i],
                 vmin);
#ifdef _OPENMP
        const int w = Parallel ? omp_get_thread_num() : 0;
#else
        const int w = 0;
#endif
        vmins[w] = std::min(vmins[w], vmin);
    }
    e.min_variance = *std::min_element(vmins.begin(), vmins.end());
    return e;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// price = scale * mean(num) / mean(den); delta-method standard error.
// Antithetic ensembles are folded into pair averages first so the error
// reflects the paired sampling.
template <typename Payoff>
McPrice ratio_estimate(double scale, const std::vector<double>& a, const std::vector<double>& b,
                       bool antithetic, Payoff payoff) {
    const std::size_t stride = antithetic ? 2 : 1;
    const std::size_t n = a.size() / stride;
    std::vector<double> num(n), den(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (antithetic) {
            num[i] = 0.5 * (payoff(a[2 * i], b[2 * i]) + payoff(a[2 * i + 1], b[2 * i + 1]));
            den[i] = 0.5 * (b[2 * i] + b[2 * i + 1]);
        } else {
            num[i] = payoff(a[i], b[i]);
            den[i] = b[i];
        }
    }
    double sn = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sn += num[i];
        sd += den[i];
    }
    const double mn = sn / n, md = sd / n;
    double vnn = 0.0, vdd = 0.0, vnd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dn = num[i] - mn;
        const double dd = den[i] - md;
        vnn += dn * dn;
        vdd += dd * dd;
        vnd += dn * dd;
    }
    vnn /= n - 1;
    vdd /= n - 1;
    vnd /= n - 1;
    const double r = mn / md;
    const double var = (vnn - 2.0 * r * vnd + r * r * vdd) / (md * md) / n;
    McPrice out;
    out.price = scale * r;
    out.std_error = scale * std::sqrt(std::max(0.0, var));
    return out;
}

} // namespace

ForwardEnsemble simulate_forwards(const HestonParams& p, const McControls& mc) {
    return simulate_impl<true>(p, mc);
}

ForwardEnsemble simulate_forwards_serial(const HestonParams& p, const McControls& mc) {
    return simulate_impl<false>(p, mc);
}

McPrice price_call_quote(const HestonParams& p, const ForwardEnsemble& e, double strike) {
    const double df = std::exp(-p.r_quote * p.maturity);
    return ratio_estimate(df, e.base_leg, e.quote_leg, e.antithetic,
                          [strike](double f1, double f2) { return std::max(f1 - strike * f2, 0.0); });
}

McPrice price_put_quote(const HestonParams& p, const ForwardEnsemble& e, double strike) {
    const double df = std::exp(-p.r_quote * p.maturity);
    return ratio_estimate(df, e.base_leg, e.quote_leg, e.antithetic,
                          [strike](double f1, double f2) { return std::max(strike * f2 - f1, 0.0); });
}

McPrice price_call_base(const HestonParams& p, const ForwardEnsemble& e, double strike) {
    const double df = std::exp(-p.r_base * p.maturity);
    return ratio_estimate(df, e.quote_leg, e.base_leg, e.antithetic,
                          [strike](double f2, double f1) { return std::max(f2 - strike * f1, 0.0); });
}

McPrice price_put_base(const HestonParams& p, const ForwardEnsemble& e, double strike) {
    const double df = std::exp(-p.r_base * p.maturity);
    return ratio_estimate(df, e.quote_leg, e.base_leg, e.antithetic,
                          [strike](double f2, double f1) { return std::max(strike * f1 - f2, 0.0); });
}

McPrice price_call_quote(const HestonParams& p, double strike, const McControls& mc) {
    return price_call_quote(p, simulate_forwards(p, mc), strike);
}

McPrice price_call_base(const HestonParams& p, double strike, const McControls& mc) {
    return price_call_base(p, simulate_forwards(p, mc), strike);
}

McPrice discount_factor_mc(const HestonParams& p, const McControls& mc, int n_steps) {
    p.validate();
    mc.validate(p.maturity);
    const double h = p.maturity / n_steps;
    const double ek = std::exp(-p.kappa * h);
    const double var1 = (p.delta * p.delta / p.kappa) * (ek - ek * ek);
    const double var2 =
        p.theta * (p.delta * p.delta / (2.0 * p.kappa)) * (1.0 - ek) * (1.0 - ek);

    std::vector<double> w(mc.n_paths);
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t i = 0; i < mc.n_paths; ++i) {
        math::NormalStream rng(mc.seed, static_cast<std::uint64_t>(i));
        double v = p.v0;
        double integral = 0.0;
        for (int n = 0; n < n_steps; ++n) {
            const double z = rng.next_normal();
            const double m = p.theta + (v - p.theta) * ek;
            const double s2 = v * var1 + var2;
            const double g2 = std::log1p(s2 / (m * m));
            const double v_next = m * std::exp(-0.5 * g2 + std::sqrt(g2) * z);
            integral += 0.5 * (v + v_next) * h;   // trapezoid on v
            v = v_next;
        }
        w[i] = std::exp(-0.5 * (p.r_quote + p.r_base) * p.maturity - integral / 8.0);
    }
    const double m = mean_of(w);
    double var = 0.0;
    for (double x : w) var += (x - m) * (x - m);
    var /= (w.size() - 1);
    return {m, std::sqrt(var / w.size())};
}

} // namespace fxip
