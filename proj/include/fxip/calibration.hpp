#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "fxip/esn.hpp"
#include "fxip/heston.hpp"
#include "fxip/market_data.hpp"

namespace fxip {

/// Three-point smile target: anchor strikes and the vols to interpolate.
struct CalibrationTarget {
    PairQuote pair;
    std::array<double, 3> strikes{};      // strictly increasing
    std::array<double, 3> target_vols{};  // put25, atm, call25

    static CalibrationTarget from_quote(const PairQuote& q);
    void validate() const;
};

struct EsnCalibrationResult {
    EsnParams params;
    std::array<double, 3> residuals{};   // model vol - target vol
    int iterations = 0;
    bool converged = false;
};

struct HestonCalibrationResult {
    HestonParams params;
    std::array<double, 3> residuals{};
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
};

/// Root-finds (a, alpha1, alpha2) with (beta1, beta2) fixed so the
/// closed-form smile interpolates the three anchors; vol tolerance 1e-8.
EsnCalibrationResult calibrate_esn(const CalibrationTarget& target,
                                   std::array<double, 3> init,
                                   std::array<double, 2> fixed_betas = {-0.5, 0.5});

/// Standard initial guess (sigma_atm, -3, 1).
EsnCalibrationResult calibrate_esn(const CalibrationTarget& target);

/// Root-finds (delta, theta, rho) with (v0, kappa) fixed, pricing by MC
/// with common random numbers so the objective is deterministic; vol
/// tolerance 5e-4.  Parameter sets violating the affine-validity
/// condition are rejected and the solver backs off.
HestonCalibrationResult calibrate_heston(const CalibrationTarget& target,
                                         std::array<double, 3> init,
                                         std::array<double, 2> fixed_v0_kappa,
                                         const McControls& mc, double vol_tol = 5e-4);

struct InverseConsistencyReport {
    std::array<double, 3> strikes{};        // inverse-market strikes 1/K
    std::array<double, 3> target_vols{};    // tag-swapped
    std::array<double, 3> model_vols{};
    std::array<double, 3> vol_std_errors{}; // zero for closed forms
    double max_deviation = 0.0;
};

/// Prices the inverse pair with the SAME parameters through the
/// base-market formulas at the reciprocal anchor strikes, inverts to
/// vols and compares with the tag-swapped smile.
InverseConsistencyReport verify_inverse_consistency(const EsnParams& params,
                                                    const CalibrationTarget& target);
InverseConsistencyReport verify_inverse_consistency(const HestonParams& params,
                                                    const CalibrationTarget& target,
                                                    const McControls& mc);

/// JSON round-trip for results (full params, residuals, iterations, seed,
/// plus the market context needed to reprice without the snapshot).
std::string esn_result_to_json(const EsnCalibrationResult& r, const PairQuote& q);
std::string heston_result_to_json(const HestonCalibrationResult& r, const PairQuote& q,
                                  const McControls& mc);
EsnParams esn_params_from_json(const std::string& text);
HestonParams heston_params_from_json(const std::string& text);
/// Market context stored alongside calibrated parameters.
PairQuote pair_context_from_json(const std::string& text);

} // namespace fxip
