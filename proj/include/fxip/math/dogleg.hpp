#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace fxip::math {

struct DoglegOptions {
    int max_iter = 200;
    double f_tol = 1e-10;          // max-norm residual target
    double jacobian_rel_step = 1e-6;
    double initial_radius = 1.0;
    double min_radius = 1e-12;
};

struct DoglegReport {
    std::vector<double> x;
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;
};

/// Square n-by-n root finding by damped Newton with a trust-region dogleg
/// safeguard and a forward-difference Jacobian.  The callable may return
/// nullopt to flag an infeasible point; the trust region then shrinks and
/// the step is retried.
class DoglegSolver {
public:
    using Fn = std::function<std::optional<std::vector<double>>(const std::vector<double>&)>;

    static DoglegReport solve(const Fn& f, std::vector<double> x0, const DoglegOptions& opt = {}) {
        const std::size_t n = x0.size();
        DoglegReport rep;
        auto fx_opt = f(x0);
        if (!fx_opt)
            throw std::domain_error("DoglegSolver: infeasible starting point");
        std::vector<double> fx = *fx_opt;
        double radius = opt.initial_radius;

        for (int iter = 0; iter < opt.max_iter; ++iter) {
            rep.iterations = iter + 1;
            if (max_abs(fx) <= opt.f_tol) {
                rep.converged = true;
                break;
            }

            // Forward-difference Jacobian, column major J[j][i] = df_i/dx_j.
            std::vector<std::vector<double>> jac(n, std::vector<double>(n));
            bool jac_ok = true;
            for (std::size_t j = 0; j < n && jac_ok; ++j) {
                const double h = opt.jacobian_rel_step * std::max(std::fabs(x0[j]), 1.0);
                auto xs = x0;
                xs[j] += h;
                auto fs = f(xs);
                if (!fs) {
                    xs[j] = x0[j] - h;
                    fs = f(xs);
                    if (!fs) { jac_ok = false; break; }
                    for (std::size_t i = 0; i < n; ++i) jac[j][i] = (fx[i] - (*fs)[i]) / h;
                } else {
                    for (std::size_t i = 0; i < n; ++i) jac[j][i] = ((*fs)[i] - fx[i]) / h;
                }
            }
            if (!jac_ok) {
                radius *= 0.25;
                if (radius < opt.min_radius) break;
                continue;
            }

            const auto newton = solve_linear(jac, fx, n);   // J p = -f
            // Cauchy point: -t * g with g = J^T f.
            std::vector<double> g(n, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) g[j] += jac[j][i] * fx[i];
            std::vector<double> jg(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) jg[i] += jac[j][i] * g[j];
            const double gnorm2 = dot(g, g);
            const double jgnorm2 = dot(jg, jg);
            const double t_cauchy = jgnorm2 > 0.0 ? gnorm2 / jgnorm2 : 0.0;

            bool progressed = false;
            while (radius >= opt.min_radius) {
                std::vector<double> step(n);
                if (newton && norm(*newton) <= radius) {
                    step = *newton;
                } else {
                    std::vector<double> pc(n);
                    for (std::size_t j = 0; j < n; ++j) pc[j] = -t_cauchy * g[j];
                    const double pcn = norm(pc);
                    if (!newton || pcn >= radius) {
                        const double scale = pcn > 0.0 ? radius / pcn : 0.0;
                        for (std::size_t j = 0; j < n; ++j) step[j] = pc[j] * scale;
                    } else {
                        // dogleg segment from Cauchy point towards Newton point
                        std::vector<double> d(n);
                        for (std::size_t j = 0; j < n; ++j) d[j] = (*newton)[j] - pc[j];
                        const double a = dot(d, d);
                        const double b = 2.0 * dot(pc, d);
                        const double c = dot(pc, pc) - radius * radius;
                        const double disc = std::max(0.0, b * b - 4.0 * a * c);
                        const double tau = a > 0.0 ? (-b + std::sqrt(disc)) / (2.0 * a) : 0.0;
                        for (std::size_t j = 0; j < n; ++j) step[j] = pc[j] + tau * d[j];
                    }
                }

                auto xt = x0;
                for (std::size_t j = 0; j < n; ++j) xt[j] += step[j];
                const auto ft = f(xt);
                if (ft) {
                    const double before = dot(fx, fx);
                    const double after = dot(*ft, *ft);
                    // predicted decrease from the linear model
                    std::vector<double> lin(fx);
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < n; ++j) lin[i] += jac[j][i] * step[j];
                    const double predicted = before - dot(lin, lin);
                    const double actual = before - after;
                    const double rho = predicted > 0.0 ? actual / predicted : -1.0;
                    if (rho > 1e-4) {
                        x0 = xt;
                        fx = *ft;
                        if (rho > 0.75 && norm(step) > 0.9 * radius) radius *= 2.0;
                        progressed = true;
                        break;
                    }
                }
                radius *= 0.25;
            }
            if (!progressed) break;
        }
        rep.x = x0;
        rep.residuals = fx;
        rep.converged = rep.converged || max_abs(fx) <= opt.f_tol;
        return rep;
    }

private:
    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    static double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }
    static double max_abs(const std::vector<double>& a) {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::fabs(v));
        return m;
    }

    // Solves J p = -f by Gaussian elimination with partial pivoting;
    // nullopt when J is numerically singular.
    static std::optional<std::vector<double>> solve_linear(
        const std::vector<std::vector<double>>& jac_cols, const std::vector<double>& f,
        std::size_t n) {
        std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m[i][j] = jac_cols[j][i];
            m[i][n] = -f[i];
        }
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
            if (std::fabs(m[piv][col]) < 1e-300) return std::nullopt;
            std::swap(m[piv], m[col]);
            for (std::size_t r = col + 1; r < n; ++r) {
                const double fac = m[r][col] / m[col][col];
                for (std::size_t c = col; c <= n; ++c) m[r][c] -= fac * m[col][c];
            }
        }
        std::vector<double> p(n);
        for (std::size_t i = n; i-- > 0;) {
            double s = m[i][n];
            for (std::size_t j = i + 1; j < n; ++j) s -= m[i][j] * p[j];
            p[i] = s / m[i][i];
        }
        return p;
    }
};

} // namespace fxip::math
