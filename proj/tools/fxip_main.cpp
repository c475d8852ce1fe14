// fxip: consistent FX option pricing off a single pseudo-currency calibration.
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fxip/calibration.hpp"
#include "fxip/esn.hpp"
#include "fxip/gk.hpp"
#include "fxip/heston.hpp"
#include "fxip/market_data.hpp"
#include "fxip/math/normal.hpp"
#include "fxip/model_free.hpp"
#include "fxip/sabr.hpp"

namespace {

using fxip::Currency;
using fxip::PairQuote;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fxip::market_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw fxip::market_error("cannot write file: " + out_path);
    out << text;
}

std::pair<Currency, Currency> parse_pair(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos)
        throw fxip::market_error("--pair expects BASE/QUOTE, e.g. GBP/EUR");
    return {Currency(s.substr(0, slash)), Currency(s.substr(slash + 1))};
}

std::array<Currency, 3> parse_triangle(const std::string& s) {
    std::array<std::string, 3> parts;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const auto comma = s.find(',', start);
        if (i < 2 && comma == std::string::npos)
            throw fxip::market_error("--triangle expects C1,C2,C3, e.g. GBP,USD,EUR");
        parts[i] = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        start = comma + 1;
    }
    return {Currency(parts[0]), Currency(parts[1]), Currency(parts[2])};
}

fxip::McControls make_controls(std::int64_t paths, double step, std::uint64_t seed) {
    fxip::McControls mc;
    mc.n_paths = paths;
    mc.step = step;
    mc.seed = seed;
    return mc;
}

fxip::GkInputs gk_context(const PairQuote& q, double strike) {
    fxip::GkInputs in;
    in.f0 = q.spot;
    in.strike = strike;
    in.maturity = q.maturity;
    in.r_quote = q.r_quote;
    in.r_base = q.r_base;
    return in;
}

fxip::SabrParams sabr_from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    const auto& pj = j.contains("params") ? j.at("params") : j;
    fxip::SabrParams p;
    p.alpha0 = pj.at("alpha0").get<double>();
    p.nu = pj.at("nu").get<double>();
    p.rho = pj.at("rho").get<double>();
    p.f0 = pj.at("f0").get<double>();
    p.r_quote = pj.at("r_quote").get<double>();
    p.r_base = pj.at("r_base").get<double>();
    p.maturity = pj.at("T").get<double>();
    p.validate();
    return p;
}

struct CommonFlags {
    std::string input, out, pair, triangle, model, params;
    double strike = 0.0;
    double maturity = 0.0;
    int grid = 50;
    std::int64_t paths = 200000;
    double step = 0.05;
    std::uint64_t seed = 12345;
};

int run_calibrate_esn(const CommonFlags& f) {
    const auto snap = fxip::load_snapshot(f.input);
    const auto [base, quote] = parse_pair(f.pair);
    const PairQuote q = snap.find_pair(base, quote);
    const auto target = fxip::CalibrationTarget::from_quote(q);
    const auto result = fxip::calibrate_esn(target);
    write_output(fxip::esn_result_to_json(result, q), f.out);
    if (!result.converged) {
        ordered_json err;
        err["error"] = "esn calibration did not converge";
        err["residuals"] = result.residuals;
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}

int run_calibrate_heston(const CommonFlags& f) {
    const auto snap = fxip::load_snapshot(f.input);
    const auto [base, quote] = parse_pair(f.pair);
    const PairQuote q = snap.find_pair(base, quote);
    const auto target = fxip::CalibrationTarget::from_quote(q);

    // optional fixed/initial values:
    // {"v0":..,"kappa":..,"init":{"delta":..,"theta":..,"rho":..}}
    double v0 = 0.0086, kappa = 1.5;
    std::array<double, 3> init{0.7, 0.03, -0.4};
    if (!f.params.empty()) {
        const auto j = ordered_json::parse(read_file(f.params));
        v0 = j.value("v0", v0);
        kappa = j.value("kappa", kappa);
        if (j.contains("init")) {
            const auto& i = j.at("init");
            init = {i.value("delta", init[0]), i.value("theta", init[1]),
                    i.value("rho", init[2])};
        }
    }
    const auto mc = make_controls(f.paths, f.step, f.seed);
    const auto result = fxip::calibrate_heston(target, init, {v0, kappa}, mc);
    write_output(fxip::heston_result_to_json(result, q, mc), f.out);
    if (!result.converged) {
        ordered_json err;
        err["error"] = "heston calibration did not converge";
        err["residuals"] = result.residuals;
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}

int run_price(const CommonFlags& f) {
    if (!(f.strike > 0.0)) throw fxip::market_error("price needs --strike > 0");
    const std::string text = read_file(f.params);
    ordered_json out;
    out["model"] = f.model;
    out["strike"] = f.strike;

    if (f.model == "gk") {
        const auto j = ordered_json::parse(text);
        const auto& p = j.contains("params") ? j.at("params") : j;
        fxip::GkInputs in;
        in.f0 = p.at("f0").get<double>();
        in.strike = f.strike;
        in.maturity = f.maturity > 0.0 ? f.maturity : p.at("T").get<double>();
        in.sigma = p.at("sigma").get<double>();
        in.r_quote = p.at("r_quote").get<double>();
        in.r_base = p.at("r_base").get<double>();
        out["call_quote"] = fxip::gk_call(in);
        out["put_quote"] = fxip::gk_put(in);
        const double put_base = fxip::intermediate_put(in) / std::sqrt(in.f0);
        out["put_base"] = put_base;
        // base-market parity: C - P = e^{-r_base T}(1/F - 1/K)
        out["call_base"] = put_base + std::exp(-in.r_base * in.maturity) *
                                          (1.0 / in.forward() - 1.0 / f.strike);
    } else if (f.model == "esn") {
        const auto p = fxip::esn_params_from_json(text);
        out["call_quote"] = fxip::esn_call_quote(p, f.strike);
        out["put_quote"] = fxip::esn_put_quote(p, f.strike);
        out["call_base"] = fxip::esn_call_base(p, f.strike);
        out["put_base"] = fxip::esn_put_base(p, f.strike);
    } else if (f.model == "heston") {
        const auto p = fxip::heston_params_from_json(text);
        const auto e = fxip::simulate_forwards(p, make_controls(f.paths, f.step, f.seed));
        const auto c = fxip::price_call_quote(p, e, f.strike);
        const auto put = fxip::price_put_quote(p, e, f.strike);
        out["call_quote"] = c.price;
        out["call_quote_se"] = c.std_error;
        out["put_quote"] = put.price;
        out["put_quote_se"] = put.std_error;
        out["call_base"] = fxip::price_call_base(p, e, 1.0 / f.strike).price;
        out["put_base"] = fxip::price_put_base(p, e, 1.0 / f.strike).price;
        out["seed"] = f.seed;
        out["n_paths"] = f.paths;
        out["step"] = f.step;
    } else if (f.model == "sabr") {
        const auto p = sabr_from_json(text);
        const auto e = fxip::simulate_sabr(p, make_controls(f.paths, f.step, f.seed));
        const auto c = fxip::sabr_call_quote(p, e, f.strike);
        const auto put = fxip::sabr_put_quote(p, e, f.strike);
        out["call_quote"] = c.price;
        out["call_quote_se"] = c.std_error;
        out["put_quote"] = put.price;
        out["put_quote_se"] = put.std_error;
        out["call_base"] = fxip::sabr_call_base(p, e, 1.0 / f.strike).price;
        out["put_base"] = fxip::sabr_put_base(p, e, 1.0 / f.strike).price;
        out["seed"] = f.seed;
    } else {
        throw fxip::market_error("price supports --model gk|esn|heston|sabr");
    }
    write_output(out.dump(2) + "\n", f.out);
    return 0;
}

int run_smile(const CommonFlags& f) {
    const std::string text = read_file(f.params);
    const PairQuote stored = fxip::pair_context_from_json(text);
    const auto [base, quote] = parse_pair(f.pair);

    bool inverse;
    if (base == stored.base && quote == stored.quote_ccy) {
        inverse = false;
    } else if (base == stored.quote_ccy && quote == stored.base) {
        inverse = true;
    } else {
        throw fxip::market_error("--pair must match the calibrated pair or its inverse");
    }
    const PairQuote view = inverse ? fxip::invert_pair(stored) : stored;
    const double k_lo = fxip::strike_from_delta(view, fxip::SmileTag::Put25) * 0.9;
    const double k_hi = fxip::strike_from_delta(view, fxip::SmileTag::Call25) * 1.1;
    const int n = std::max(2, f.grid);
    const double fwd = fxip::forward_rate(view);

    fxip::EsnParams esn_params;
    fxip::HestonParams heston_params;
    fxip::ForwardEnsemble ensemble;   // heston paths, shared across strikes
    if (f.model == "esn") {
        esn_params = fxip::esn_params_from_json(text);
    } else if (f.model == "heston") {
        heston_params = fxip::heston_params_from_json(text);
        ensemble = fxip::simulate_forwards(heston_params, make_controls(f.paths, f.step, f.seed));
    } else {
        throw fxip::market_error("smile supports --model esn|heston");
    }

    std::string csv = "strike,forward_call_delta,implied_vol\n";
    for (int i = 0; i < n; ++i) {
        const double k = k_lo + (k_hi - k_lo) * i / (n - 1);
        double price;
        if (f.model == "esn") {
            price = inverse ? fxip::esn_call_base(esn_params, 1.0 / k)
                            : fxip::esn_call_quote(esn_params, k);
        } else {
            price = inverse ? fxip::price_call_base(heston_params, ensemble, k).price
                            : fxip::price_call_quote(heston_params, ensemble, k).price;
        }
        const double vol = fxip::implied_vol(price, gk_context(view, k), fxip::OptionKind::Call);
        const double dplus = (std::log(fwd / k) + 0.5 * vol * vol * view.maturity) /
                             (vol * std::sqrt(view.maturity));
        csv += format_double(k) + ',' + format_double(fxip::math::normal_cdf(dplus)) + ',' +
               format_double(vol) + '\n';
    }
    write_output(csv, f.out);
    return 0;
}

int run_density(const CommonFlags& f) {
    const auto snap = fxip::load_snapshot(f.input);
    const auto tri = parse_triangle(f.triangle);
    const auto t = fxip::TriangleMarket::from_snapshot(snap, tri[0], tri[1], tri[2]);
    const int n = std::max(8, f.grid);
    // default window: two ATM standard deviations around each forward
    const double width = 2.0;
    const auto k1s = fxip::make_strike_grid(t.f1, t.smile1.vol(t.f1), t.maturity, n, width);
    const auto k2s = fxip::make_strike_grid(t.f2, t.smile2.vol(t.f2), t.maturity, n, width);
    const auto g = fxip::scaled_joint_density(t, k1s, k2s);
    write_output(fxip::density_to_csv(g), f.out);
    if (!f.out.empty()) write_output(fxip::density_metadata_json(g), f.out + ".meta.json");
    return 0;
}

int run_basket(const CommonFlags& f) {
    if (!(f.strike > 0.0)) throw fxip::market_error("basket needs --strike > 0");
    const auto snap = fxip::load_snapshot(f.input);
    const auto tri = parse_triangle(f.triangle);
    const auto t = fxip::TriangleMarket::from_snapshot(snap, tri[0], tri[1], tri[2]);
    double w1 = 0.5, w2 = 0.5;
    if (!f.params.empty()) {
        const auto j = ordered_json::parse(read_file(f.params));
        w1 = j.value("w1", w1);
        w2 = j.value("w2", w2);
    }
    ordered_json out;
    out["triangle"] = f.triangle;
    out["strike"] = f.strike;
    out["w1"] = w1;
    out["w2"] = w2;
    out["basket_put_c3"] = fxip::basket_put_c3(t, w1, w2, f.strike);
    out["basket_put_c1"] = fxip::basket_put_c1(t, w1, w2, f.strike);
    write_output(out.dump(2) + "\n", f.out);
    return 0;
}

int run_verify_symmetry(const CommonFlags& f) {
    const std::string text = read_file(f.params);
    ordered_json out;
    out["model"] = f.model;
    const int n = std::max(3, f.grid);
    double max_rel = 0.0;

    if (f.model == "esn") {
        const auto p = fxip::esn_params_from_json(text);
        const double f0 = p.spot();
        for (int i = 0; i < n; ++i) {
            const double k = p.forward * std::exp(-0.3 + 0.6 * i / (n - 1));
            const double call = fxip::esn_call_quote(p, k);
            const double rhs = f0 * k * fxip::esn_put_base(p, k);
            max_rel = std::max(max_rel, std::fabs(call / rhs - 1.0));
        }
    } else if (f.model == "gk") {
        const auto j = ordered_json::parse(text);
        const auto& pj = j.contains("params") ? j.at("params") : j;
        fxip::GkInputs in;
        in.f0 = pj.at("f0").get<double>();
        in.maturity = pj.at("T").get<double>();
        in.sigma = pj.at("sigma").get<double>();
        in.r_quote = pj.at("r_quote").get<double>();
        in.r_base = pj.at("r_base").get<double>();
        for (int i = 0; i < n; ++i) {
            in.strike = in.forward() * std::exp(-0.3 + 0.6 * i / (n - 1));
            const double call = fxip::gk_call(in);
            const double rhs = in.f0 * in.strike * fxip::intermediate_put(in) / std::sqrt(in.f0);
            max_rel = std::max(max_rel, std::fabs(call / rhs - 1.0));
        }
    } else if (f.model == "heston") {
        const auto p = fxip::heston_params_from_json(text);
        const auto e = fxip::simulate_forwards(p, make_controls(f.paths, f.step, f.seed));
        double max_z = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = p.f0 * std::exp(-0.25 + 0.5 * i / (n - 1));
            const auto call = fxip::price_call_quote(p, e, k);
            const auto put = fxip::price_put_base(p, e, 1.0 / k);
            const double diff = call.price - p.f0 * k * put.price;
            const double se = std::hypot(call.std_error, p.f0 * k * put.std_error);
            max_rel = std::max(max_rel, std::fabs(diff) / call.price);
            max_z = std::max(max_z, std::fabs(diff) / se);
        }
        out["max_z_score"] = max_z;
    } else if (f.model == "sabr") {
        const auto p = sabr_from_json(text);
        const auto e = fxip::simulate_sabr(p, make_controls(f.paths, f.step, f.seed));
        for (int i = 0; i < n; ++i) {
            const double k = p.f0 * std::exp(-0.25 + 0.5 * i / (n - 1));
            const double call = fxip::sabr_call_quote(p, e, k).price;
            const double rhs = p.f0 * k * fxip::sabr_put_base(p, e, 1.0 / k).price;
            max_rel = std::max(max_rel, std::fabs(call / rhs - 1.0));
        }
    } else {
        throw fxip::market_error("verify-symmetry supports --model gk|esn|heston|sabr");
    }
    out["strikes_checked"] = n;
    out["max_relative_deviation"] = max_rel;

    // optional inverse-smile reproduction report against a snapshot
    if (!f.input.empty() && !f.pair.empty()) {
        const auto snap = fxip::load_snapshot(f.input);
        const auto [base, quote] = parse_pair(f.pair);
        const auto target = fxip::CalibrationTarget::from_quote(snap.find_pair(base, quote));
        if (f.model == "esn") {
            const auto rep =
                fxip::verify_inverse_consistency(fxip::esn_params_from_json(text), target);
            out["inverse_smile_max_vol_deviation"] = rep.max_deviation;
        } else if (f.model == "heston") {
            const auto rep = fxip::verify_inverse_consistency(
                fxip::heston_params_from_json(text), target,
                make_controls(f.paths, f.step, f.seed));
            out["inverse_smile_max_vol_deviation"] = rep.max_deviation;
            out["inverse_smile_vol_std_errors"] = rep.vol_std_errors;
        }
    }
    write_output(out.dump(2) + "\n", f.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FX option pricing under an intermediate pseudo-currency"};
    app.require_subcommand(1);

    CommonFlags f;
    auto add_common = [&](CLI::App* cmd, bool io_only = false) {
        cmd->add_option("--out", f.out, "output file (stdout when omitted)");
        if (!io_only) {
            cmd->add_option("--seed", f.seed, "Monte Carlo seed");
            cmd->add_option("--paths", f.paths, "Monte Carlo path count");
            cmd->add_option("--step", f.step, "Monte Carlo time step");
        }
    };

    auto* cal_esn = app.add_subcommand("calibrate-esn", "fit the skew-normal law to a smile");
    cal_esn->add_option("--input", f.input, "market snapshot JSON")->required();
    cal_esn->add_option("--pair", f.pair, "currency pair BASE/QUOTE")->required();
    add_common(cal_esn, true);

    auto* cal_hes = app.add_subcommand("calibrate-heston", "fit Heston (delta, theta, rho)");
    cal_hes->add_option("--input", f.input)->required();
    cal_hes->add_option("--pair", f.pair)->required();
    cal_hes->add_option("--params", f.params, "fixed v0/kappa and initial values JSON");
    add_common(cal_hes);

    auto* price = app.add_subcommand("price", "price calls/puts on both markets");
    price->add_option("--model", f.model, "gk|esn|heston|sabr")->required();
    price->add_option("--params", f.params, "model parameter JSON")->required();
    price->add_option("--strike", f.strike)->required();
    price->add_option("--maturity", f.maturity, "override maturity (gk only)");
    add_common(price);

    auto* smile = app.add_subcommand("smile", "implied-vol curve for a pair or its inverse");
    smile->add_option("--model", f.model, "esn|heston")->required();
    smile->add_option("--params", f.params)->required();
    smile->add_option("--pair", f.pair)->required();
    smile->add_option("--grid", f.grid, "number of strikes");
    add_common(smile);

    auto* density = app.add_subcommand("density", "scaled joint density for a triangle");
    density->add_option("--input", f.input)->required();
    density->add_option("--triangle", f.triangle, "C1,C2,C3")->required();
    density->add_option("--grid", f.grid, "grid points per axis");
    add_common(density, true);

    auto* basket = app.add_subcommand("basket", "two-asset basket puts on c3 and c1 markets");
    basket->add_option("--input", f.input)->required();
    basket->add_option("--triangle", f.triangle)->required();
    basket->add_option("--strike", f.strike)->required();
    basket->add_option("--params", f.params, "weights JSON {\"w1\":..,\"w2\":..}");
    add_common(basket, true);

    auto* verify = app.add_subcommand("verify-symmetry", "foreign-domestic symmetry report");
    verify->add_option("--model", f.model, "gk|esn|heston|sabr")->required();
    verify->add_option("--params", f.params)->required();
    verify->add_option("--grid", f.grid, "strikes to check");
    verify->add_option("--input", f.input, "snapshot for the inverse-smile check");
    verify->add_option("--pair", f.pair, "calibrated pair for the inverse-smile check");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cal_esn->parsed()) return run_calibrate_esn(f);
        if (cal_hes->parsed()) return run_calibrate_heston(f);
        if (price->parsed()) return run_price(f);
        if (smile->parsed()) return run_smile(f);
        if (density->parsed()) return run_density(f);
        if (basket->parsed()) return run_basket(f);
        if (verify->parsed()) return run_verify_symmetry(f);
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 2;
}
