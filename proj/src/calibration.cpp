#include "fxip/calibration.hpp"

#include <cmath>

#include <json.hpp>

#include "fxip/gk.hpp"
#include "fxip/math/dogleg.hpp"

namespace fxip {

CalibrationTarget CalibrationTarget::from_quote(const PairQuote& q) {
    CalibrationTarget t;
    t.pair = q;
    t.strikes = {strike_from_delta(q, SmileTag::Put25), strike_from_delta(q, SmileTag::Atm),
                 strike_from_delta(q, SmileTag::Call25)};
    t.target_vols = {q.vol_put25, q.vol_atm, q.vol_call25};
    t.validate();
    return t;
}

void CalibrationTarget::validate() const {
    if (!(strikes[0] < strikes[1] && strikes[1] < strikes[2]))
        throw market_error("CalibrationTarget: strikes must be strictly increasing");
}

namespace {

GkInputs gk_context(const PairQuote& q, double strike) {
    GkInputs in;
    in.f0 = q.spot;
    in.strike = strike;
    in.maturity = q.maturity;
    in.r_quote = q.r_quote;
    in.r_base = q.r_base;
    return in;
}

} // namespace

EsnCalibrationResult calibrate_esn(const CalibrationTarget& target, std::array<double, 3> init,
                                   std::array<double, 2> fixed_betas) {
    target.validate();
    const PairQuote& q = target.pair;
    EsnParams base;
    base.beta1 = fixed_betas[0];
    base.beta2 = fixed_betas[1];
    base.forward = forward_rate(q);
    base.r_quote = q.r_quote;
    base.r_base = q.r_base;
    base.maturity = q.maturity;

    auto objective = [&](const std::vector<double>& x) -> std::optional<std::vector<double>> {
        if (!(x[0] > 0.0)) return std::nullopt;
        EsnParams p = base;
        p.a = x[0];
        p.alpha1 = x[1];
        p.alpha2 = x[2];
        std::vector<double> res(3);
        try {
            for (int i = 0; i < 3; ++i) {
                const double price = esn_call_quote(p, target.strikes[i]);
                res[i] = implied_vol(price, gk_context(q, target.strikes[i]), OptionKind::Call) -
                         target.target_vols[i];
            }
        } catch (const std::exception&) {
            return std::nullopt;
        }
        return res;
    };

    math::DoglegOptions opt;
    opt.f_tol = 1e-10;   // comfortably below the 1e-8 vol gate
    opt.max_iter = 200;
    const auto rep = math::DoglegSolver::solve(objective, {init[0], init[1], init[2]}, opt);

    EsnCalibrationResult out;
    out.params = base;
    out.params.a = rep.x[0];
    out.params.alpha1 = rep.x[1];
    out.params.alpha2 = rep.x[2];
    for (int i = 0; i < 3; ++i) out.residuals[i] = rep.residuals[i];
    out.iterations = rep.iterations;
    out.converged = rep.converged &&
                    std::max({std::fabs(rep.residuals[0]), std::fabs(rep.residuals[1]),
                              std::fabs(rep.residuals[2])}) < 1e-8;
    return out;
}

EsnCalibrationResult calibrate_esn(const CalibrationTarget& target) {
    return calibrate_esn(target, {target.pair.vol_atm, -3.0, 1.0});
}

HestonCalibrationResult calibrate_heston(const CalibrationTarget& target,
                                         std::array<double, 3> init,
                                         std::array<double, 2> fixed_v0_kappa,
                                         const McControls& mc, double vol_tol) {
    target.validate();
    const PairQuote& q = target.pair;
    HestonParams base;
    base.v0 = fixed_v0_kappa[0];
    base.kappa = fixed_v0_kappa[1];
    base.f0 = q.spot;
    base.r_quote = q.r_quote;
    base.r_base = q.r_base;
    base.maturity = q.maturity;

    auto objective = [&](const std::vector<double>& x) -> std::optional<std::vector<double>> {
        HestonParams p = base;
        p.delta = x[0];
        p.theta = x[1];
        p.rho = x[2];
        std::vector<double> res(3);
        try {
            p.validate();   // rejects the affine-validity violations
            const ForwardEnsemble e = simulate_forwards(p, mc);   // common random numbers
            for (int i = 0; i < 3; ++i) {
                const McPrice price = price_call_quote(p, e, target.strikes[i]);
                res[i] =
                    implied_vol(price.price, gk_context(q, target.strikes[i]), OptionKind::Call) -
                    target.target_vols[i];
            }
        } catch (const std::exception&) {
            return std::nullopt;
        }
        return res;
    };

    math::DoglegOptions opt;
    opt.f_tol = vol_tol;
    opt.max_iter = 200;
    opt.initial_radius = 0.25;
    const auto rep = math::DoglegSolver::solve(objective, {init[0], init[1], init[2]}, opt);

    HestonCalibrationResult out;
    out.params = base;
    out.params.delta = rep.x[0];
    out.params.theta = rep.x[1];
    out.params.rho = rep.x[2];
    for (int i = 0; i < 3; ++i) out.residuals[i] = rep.residuals[i];
    out.iterations = rep.iterations;
    out.converged = rep.converged;
    out.seed = mc.seed;
    return out;
}

namespace {

// Inverse-market GK context: spot inverted, rates swapped.
GkInputs inverse_gk_context(const PairQuote& q, double strike) {
    GkInputs in;
    in.f0 = 1.0 / q.spot;
    in.strike = strike;
    in.maturity = q.maturity;
    in.r_quote = q.r_base;
    in.r_base = q.r_quote;
    return in;
}

} // namespace

InverseConsistencyReport verify_inverse_consistency(const EsnParams& params,
                                                    const CalibrationTarget& target) {
    InverseConsistencyReport rep;
    for (int i = 0; i < 3; ++i) {
        const double k = target.strikes[i];
        rep.strikes[i] = 1.0 / k;
        rep.target_vols[i] = target.target_vols[i];
        // base-market put on the inverse pair at strike 1/K, in base ccy
        const double price = esn_put_base(params, k);
        rep.model_vols[i] =
            implied_vol(price, inverse_gk_context(target.pair, 1.0 / k), OptionKind::Put);
        rep.max_deviation =
            std::max(rep.max_deviation, std::fabs(rep.model_vols[i] - rep.target_vols[i]));
    }
    return rep;
}

InverseConsistencyReport verify_inverse_consistency(const HestonParams& params,
                                                    const CalibrationTarget& target,
                                                    const McControls& mc) {
    InverseConsistencyReport rep;
    const ForwardEnsemble e = simulate_forwards(params, mc);
    for (int i = 0; i < 3; ++i) {
        const double k = target.strikes[i];
        rep.strikes[i] = 1.0 / k;
        rep.target_vols[i] = target.target_vols[i];
        const McPrice price = price_put_base(params, e, 1.0 / k);
        const GkInputs ctx = inverse_gk_context(target.pair, 1.0 / k);
        rep.model_vols[i] = implied_vol(price.price, ctx, OptionKind::Put);
        // vol standard error through the put vega
        GkInputs with_vol = ctx;
        with_vol.sigma = rep.model_vols[i];
        const double h = 1e-5;
        GkInputs up = with_vol;
        up.sigma += h;
        const double vega = (gk_put(up) - gk_put(with_vol)) / h;
        rep.vol_std_errors[i] = price.std_error / vega;
        rep.max_deviation =
            std::max(rep.max_deviation, std::fabs(rep.model_vols[i] - rep.target_vols[i]));
    }
    return rep;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json market_context(const PairQuote& q) {
    return ordered_json{{"base", q.base.code()},
                        {"quote", q.quote_ccy.code()},
                        {"spot", q.spot},
                        {"T", q.maturity},
                        {"r_base", q.r_base},
                        {"r_quote", q.r_quote},
                        {"smile", ordered_json{{"put25", q.vol_put25},
                                               {"atm", q.vol_atm},
                                               {"call25", q.vol_call25}}}};
}

} // namespace

std::string esn_result_to_json(const EsnCalibrationResult& r, const PairQuote& q) {
    ordered_json j;
    j["model"] = "esn";
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["residuals"] = r.residuals;
    j["params"] = ordered_json{{"a", r.params.a},       {"alpha1", r.params.alpha1},
                               {"alpha2", r.params.alpha2}, {"beta1", r.params.beta1},
                               {"beta2", r.params.beta2},   {"forward", r.params.forward},
                               {"r_quote", r.params.r_quote}, {"r_base", r.params.r_base},
                               {"T", r.params.maturity}};
    j["market"] = market_context(q);
    return j.dump(2) + "\n";
}

std::string heston_result_to_json(const HestonCalibrationResult& r, const PairQuote& q,
                                  const McControls& mc) {
    ordered_json j;
    j["model"] = "heston";
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["residuals"] = r.residuals;
    j["seed"] = r.seed;
    j["n_paths"] = mc.n_paths;
    j["step"] = mc.step;
    j["params"] = ordered_json{{"v0", r.params.v0},       {"kappa", r.params.kappa},
                               {"theta", r.params.theta}, {"delta", r.params.delta},
                               {"rho", r.params.rho},     {"f0", r.params.f0},
                               {"r_quote", r.params.r_quote}, {"r_base", r.params.r_base},
                               {"T", r.params.maturity}};
    j["market"] = market_context(q);
    return j.dump(2) + "\n";
}

namespace {

ordered_json parse_params_object(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    return j.contains("params") ? j.at("params") : j;
}

} // namespace

EsnParams esn_params_from_json(const std::string& text) {
    const ordered_json p = parse_params_object(text);
    EsnParams out;
    out.a = p.at("a").get<double>();
    out.alpha1 = p.at("alpha1").get<double>();
    out.alpha2 = p.at("alpha2").get<double>();
    out.beta1 = p.at("beta1").get<double>();
    out.beta2 = p.at("beta2").get<double>();
    out.forward = p.at("forward").get<double>();
    out.r_quote = p.at("r_quote").get<double>();
    out.r_base = p.at("r_base").get<double>();
    out.maturity = p.at("T").get<double>();
    out.validate();
    return out;
}

HestonParams heston_params_from_json(const std::string& text) {
    const ordered_json p = parse_params_object(text);
    HestonParams out;
    out.v0 = p.at("v0").get<double>();
    out.kappa = p.at("kappa").get<double>();
    out.theta = p.at("theta").get<double>();
    out.delta = p.at("delta").get<double>();
    out.rho = p.at("rho").get<double>();
    out.f0 = p.at("f0").get<double>();
    out.r_quote = p.at("r_quote").get<double>();
    out.r_base = p.at("r_base").get<double>();
    out.maturity = p.at("T").get<double>();
    out.validate();
    return out;
}

PairQuote pair_context_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (!j.contains("market"))
        throw market_error("params file carries no market context");
    const auto& m = j.at("market");
    PairQuote q;
    q.base = Currency(m.at("base").get<std::string>());
    q.quote_ccy = Currency(m.at("quote").get<std::string>());
    q.spot = m.at("spot").get<double>();
    q.maturity = m.at("T").get<double>();
    q.r_base = m.at("r_base").get<double>();
    q.r_quote = m.at("r_quote").get<double>();
    const auto& s = m.at("smile");
    q.vol_put25 = s.at("put25").get<double>();
    q.vol_atm = s.at("atm").get<double>();
    q.vol_call25 = s.at("call25").get<double>();
    q.validate();
    return q;
}

} // namespace fxip
