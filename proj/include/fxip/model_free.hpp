#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fxip/market_data.hpp"

namespace fxip {

class inconsistent_smiles : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exp-quadratic smile: sigma(K) = sqrt(log(p1 K^2 + p2 K + p3)) with the
/// quadratic fit through the three anchor points transformed by exp(vol^2).
/// Outside the anchor range [k_min, k_max] the strike argument is soft-
/// clipped (C1 map, identity inside, asymptotically constant), so the far
/// wings are flat and sigma^2(K) = o(|log K|) holds.
class SmileCurve {
public:
    /// Fits through three (strike, vol) anchors, strictly increasing strikes.
    SmileCurve(const std::array<double, 3>& strikes, const std::array<double, 3>& vols,
               double maturity);

    /// Anchors from a quote's 25-delta strikes.
    static SmileCurve from_quote(const PairQuote& q);

    double vol(double strike) const;
    double dvol_dk(double strike) const;   // derivative of vol(), zero far out

    double k_min() const { return k_min_; }
    double k_max() const { return k_max_; }
    double maturity() const { return maturity_; }
    /// Strikes where the curve is only C1 (soft-clip joins); quadrature
    /// breakpoints.
    std::array<double, 2> joins() const { return {k_min_, k_max_}; }

private:
    double map_strike(double k, double& jacobian) const;

    double p1_ = 0.0, p2_ = 0.0, p3_ = 0.0;
    double k_min_ = 0.0, k_max_ = 0.0;
    double ext_lo_ = 0.0, ext_hi_ = 0.0;
    double maturity_ = 0.0;
};

/// Three-currency market (pairs c1/c3, c2/c3, cross c1/c2) with the cross
/// forward pinned to F3 = F1/F2.
struct TriangleMarket {
    SmileCurve smile1, smile2, smile3;
    double f1 = 0.0, f2 = 0.0, f3 = 0.0;   // forwards, f3 = f1/f2
    double spot1 = 0.0;                    // S_{c1/c3}(0)
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;   // c1, c2, c3 rates
    double maturity = 0.0;

    /// Builds from a snapshot; quotes are reoriented as needed.
    static TriangleMarket from_snapshot(const MarketSnapshot& snap, const Currency& c1,
                                        const Currency& c2, const Currency& c3);

    /// Pointwise implied correlations from the three smiles.
    double rho12(double k1, double k2) const;
    bool triangle_ok(double k1, double k2) const;
};

/// Breeden-Litzenberger d^2C/dK^2 of the smile-consistent call, by a
/// central second difference with relative step h_rel.
double single_pair_density(const SmileCurve& smile, double forward, double r_quote,
                           double maturity, double strike, double h_rel = 1e-4);

/// Best-of option value on the c3 market,
///   payoff max{ (S1-K1)_+/K1, (S2-K2)_+/K2 },
/// evaluated with smile vols at (K1, K2, K1/K2).  Throws
/// inconsistent_smiles when an implied correlation leaves (-1,1).
double best_of_value(const TriangleMarket& t, double k1, double k2);

/// U = [1 + K1 d/dK1 + K2 d/dK2] applied to best_of_value, in closed form
/// including the smile-slope terms.  Infinite strikes select the
/// single-asset tail expressions.
double best_of_u(const TriangleMarket& t, double k1, double k2);

/// Scaled joint density D = d^2 U / dK1 dK2 on a strike grid; D equals
/// e^{-r3 T} K1^{-1/3} K2^{-1/3} rho(K1,K2;T) / E[S_{c3/X}(T)].
struct DensityGrid {
    std::vector<double> k1, k2;
    std::vector<std::vector<double>> u;   // u[i][j] at (k1[i], k2[j])
    std::vector<std::vector<double>> d;
    double r3 = 0.0;
    double maturity = 0.0;
    // diagnostics: negative density cells are reported, never clamped
    std::size_t negative_count = 0;
    double min_density = 0.0;
    double worst_k1 = 0.0, worst_k2 = 0.0;
};

DensityGrid scaled_joint_density(const TriangleMarket& t, const std::vector<double>& k1_grid,
                                 const std::vector<double>& k2_grid, double h_rel = 1e-4);
DensityGrid scaled_joint_density_serial(const TriangleMarket& t,
                                        const std::vector<double>& k1_grid,
                                        const std::vector<double>& k2_grid, double h_rel = 1e-4);

/// Geometric strike grid F e^{[-w, +w] sigma sqrt(T)} with n points.
std::vector<double> make_strike_grid(double forward, double vol_atm, double maturity, int n,
                                     double width_sigmas);

/// Basket put on the c3 market, payoff (K - w1 S1 - w2 S2)_+ in c3:
///   K e^{-r3 T} + int_0^K U(z/w1, (K-z)/w2) dz.
/// With one zero weight this reproduces the smile-consistent vanilla put.
double basket_put_c3(const TriangleMarket& t, double w1, double w2, double strike,
                     double tol = 1e-9);

/// Basket put on the c1 market, payoff (K - w1 S_{c3/c1} - w2 S_{c2/c1})_+
/// in c1, priced off the same U surface:
///   S_{c3/c1}(0) w2 int_0^inf [U(inf, u) - U((w2 u + w1)/K, u)] du.
double basket_put_c1(const TriangleMarket& t, double w1, double w2, double strike,
                     double tol = 1e-9);

/// CSV with a header row of K2 values, first column K1, cells D[i][j];
/// numbers carry 17 significant digits.
std::string density_to_csv(const DensityGrid& g);
/// Sidecar metadata (rates, maturity, scaling note, diagnostics).
std::string density_metadata_json(const DensityGrid& g);

} // namespace fxip
