#pragma once

// Littlewood-Paley functionals built on the harmonic extension Q_t:
//
//     G_up(x)^2    = int_0^inf t |d/dt Q_t f(x)|^2 dt
//     G_right(x)^2 = int_0^inf t int_{|h| < t^(2/a)} (Q_t f(x+h) - Q_t f(x))^2 |h|^(-1-a) dh dt
//     G(x)^2       = G_up(x)^2 + G_right(x)^2
//     G*_up(x)^2   = int_0^inf t (K_t^lambda * |d/dt Q_t f|^2)(x) dt

#include "fracmul/core.hpp"
#include "fracmul/fracderiv.hpp"
#include "fracmul/multiplier_spec.hpp"
#include "fracmul/report.hpp"

#include <string>
#include <vector>

namespace fracmul {

/// Geometric nodes on [t_min, t_max], trapezoid rule in log t.
struct TimeQuadrature {
    double t_min = 1e-3;
    double t_max = 1e3;
    std::size_t nodes = 256;

    TimeQuadrature() = default;
    TimeQuadrature(double t_min, double t_max, std::size_t nodes);

    std::vector<double> points() const;
    /// Weights for int g(t) dt (already include the Jacobian t).
    std::vector<double> weights() const;
    TimeQuadrature refined() const { return {t_min, t_max, 2 * nodes}; }
};

/// A square function together with its truncation diagnostics.
struct GResult {
    SampledFunction values;
    /// Estimated int over (0, t_min) and (t_max, inf) of the squared integrand,
    /// summed over the grid, relative to the computed part.
    double head_fraction = 0.0;
    double tail_fraction = 0.0;
};

/// Throws ConvergenceError when the truncated tails exceed 1% of the computed part.
GResult g_vertical(const SampledFunction& f, double alpha, const TimeQuadrature& tq = {});

/// int (u(x+y) - u(x))^2 |y|^(-1-a) dy over R, i.e. (Lambda + Lambda^-)(u, u)
/// divided by a/Gamma(1-a).
SampledFunction carre_du_champ(const SampledFunction& u, const FracParams& p);

/// The inner integral always uses the periodic rule, consistent with the
/// spectral Q_t; only alpha and near_cut are taken from p.
GResult g_horizontal(const SampledFunction& f, double alpha, const TimeQuadrature& tq, const FracParams& p);

/// sqrt(G_up^2 + G_right^2); the horizontal term enters squared.
GResult g_full(const SampledFunction& f, double alpha, const TimeQuadrature& tq, const FracParams& p);

/// t^(-2/a) (t^(2/a) / (t^(2/a) + |x|))^lambda.  Throws unless lambda > 1.
double kernel_K_lambda(double t, double lambda, double x, double alpha);
/// int_R K_t^lambda dx by composite quadrature (exact value 2/(lambda - 1)).
double kernel_K_lambda_mass(double t, double lambda, double alpha);

GResult g_star_vertical(const SampledFunction& f, double alpha, double lambda, const TimeQuadrature& tq = {});

/// max over x of G_up[T_m f](x) / (C1 G*_up[f](x)) where G*_up[f] is not negligible.
double measured_domination_constant(const SampledFunction& f, const MultiplierSpec& m, double alpha, double lambda,
                                    double c1, const TimeQuadrature& tq = {});

struct NamedFunction {
    std::string name;
    RealLineFunction fn;
};

struct RatioOptions {
    double alpha = 0.75;
    double p = 2.0;
    double lambda = 1.5;
    double lower = 1.0 / 50.0;
    double upper = 50.0;
    double refinement_tol = 0.05;
    TimeQuadrature tq{};
};

/// Ratios ||G_up f||_p / ||f||_p and (for p >= 2) ||G*_up f||_p / ||f||_p per
/// function; the refinement repeats each on grid.refined() with doubled nodes.
VerificationReport norm_ratio_report(const std::vector<NamedFunction>& suite, const GridSpec& grid,
                                     const RatioOptions& opt);
/// Same on fixed samples; refinement doubles the time nodes only.
VerificationReport norm_ratio_report(const std::vector<SampledFunction>& suite, const RatioOptions& opt);

}  // namespace fracmul
