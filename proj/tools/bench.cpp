// Timing harness comparing the OpenMP kernels against their serial
// reference implementations.  Run with no arguments; FXIP_THREADS caps
// the worker count.
#include <chrono>
#include <cstdio>

#include "fxip/heston.hpp"
#include "fxip/market_data.hpp"
#include "fxip/model_free.hpp"
#include "fxip/parallel.hpp"
#include "fxip/sabr.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& body) {
    const auto t0 = clock_type::now();
    body();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

fxip::HestonParams heston_params() {
    fxip::HestonParams p;
    p.v0 = 0.0086;
    p.kappa = 1.5;
    p.theta = 0.02949445852250;
    p.delta = 0.71020580946071;
    p.rho = -0.40966532579627;
    p.f0 = 1.2935;
    p.r_quote = 0.0;
    p.r_base = 0.0025;
    p.maturity = 1.0;
    return p;
}

fxip::SabrParams sabr_params() {
    fxip::SabrParams p;
    p.alpha0 = 0.11;
    p.nu = 0.6;
    p.rho = -0.3;
    p.f0 = 1.2935;
    p.r_quote = 0.0;
    p.r_base = 0.0025;
    p.maturity = 1.0;
    return p;
}

fxip::TriangleMarket triangle() {
    fxip::MarketSnapshot snap;
    snap.asof = "2016-06-03";
    fxip::PairQuote q1;
    q1.base = fxip::Currency("GBP");
    q1.quote_ccy = fxip::Currency("EUR");
    q1.spot = 1.2935;
    q1.maturity = 1.0;
    q1.r_base = 0.0025;
    q1.r_quote = 0.0;
    q1.vol_put25 = 0.12435;
    q1.vol_atm = 0.10945;
    q1.vol_call25 = 0.10345;
    auto q2 = q1;
    q2.base = fxip::Currency("USD");
    q2.spot = 0.8968;
    q2.vol_put25 = 0.09005;
    q2.vol_atm = 0.09250;
    q2.vol_call25 = 0.10265;
    auto q3 = q1;
    q3.quote_ccy = fxip::Currency("USD");
    q3.spot = 1.4423;
    q3.r_quote = 0.0025;
    q3.vol_put25 = 0.11000;
    q3.vol_atm = 0.13072;
    q3.vol_call25 = 0.09972;
    snap.pairs = {q1, q2, q3};
    return fxip::TriangleMarket::from_snapshot(snap, fxip::Currency("GBP"),
                                               fxip::Currency("USD"), fxip::Currency("EUR"));
}

} // namespace

int main() {
    std::printf("workers: %d\n\n", fxip::worker_count());

    {
        const auto p = heston_params();
        fxip::McControls mc;
        mc.n_paths = 500000;
        mc.step = 0.05;
        mc.seed = 1;
        double sum = 0.0;
        const double serial = time_ms([&] {
            sum += fxip::simulate_forwards_serial(p, mc).base_leg[0];
        });
        const double parallel = time_ms([&] {
            sum += fxip::simulate_forwards(p, mc).base_leg[0];
        });
        std::printf("heston forwards, %lld paths x %d steps\n",
                    static_cast<long long>(mc.n_paths), 20);
        std::printf("  serial   %8.1f ms\n  parallel %8.1f ms   speedup %.2fx\n\n", serial,
                    parallel, serial / parallel);
        (void)sum;
    }

    {
        const auto p = sabr_params();
        fxip::McControls mc;
        mc.n_paths = 500000;
        mc.step = 0.05;
        mc.seed = 1;
        double sum = 0.0;
        const double serial =
            time_ms([&] { sum += fxip::simulate_sabr_serial(p, mc).sqrt_f[0]; });
        const double parallel = time_ms([&] { sum += fxip::simulate_sabr(p, mc).sqrt_f[0]; });
        std::printf("sabr paths, %lld paths x %d steps\n", static_cast<long long>(mc.n_paths),
                    20);
        std::printf("  serial   %8.1f ms\n  parallel %8.1f ms   speedup %.2fx\n\n", serial,
                    parallel, serial / parallel);
        (void)sum;
    }

    {
        const auto t = triangle();
        const auto k1s = fxip::make_strike_grid(t.f1, 0.10945, 1.0, 120, 1.5);
        const auto k2s = fxip::make_strike_grid(t.f2, 0.0925, 1.0, 120, 1.5);
        double sum = 0.0;
        const double serial =
            time_ms([&] { sum += fxip::scaled_joint_density_serial(t, k1s, k2s).d[1][1]; });
        const double parallel =
            time_ms([&] { sum += fxip::scaled_joint_density(t, k1s, k2s).d[1][1]; });
        std::printf("density grid, %zux%zu nodes\n", k1s.size(), k2s.size());
        std::printf("  serial   %8.1f ms\n  parallel %8.1f ms   speedup %.2fx\n", serial,
                    parallel, serial / parallel);
        (void)sum;
    }
    return 0;
}
