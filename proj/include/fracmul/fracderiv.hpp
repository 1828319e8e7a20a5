#pragma once

// Generator-form fractional derivatives
//
//     D_a f(x)  = a/Gamma(1-a) int_0^inf (f(x) - f(x-y)) y^(-1-a) dy
//     D_a^- f(x) = a/Gamma(1-a) int_0^inf (f(x) - f(x+y)) y^(-1-a) dy
//
// the stable generator L = -D_a - D_a^-, and the cross-increment forms
// Lambda_a, Lambda_a^-.
//
// Grid operators share one node rule: for phi with phi(0) = 0,
//
//     int_0^Y phi(y) y^(-1-a) dy  ~  sum_k w_k phi(k h),
//
// whose weights integrate a piecewise quadratic interpolant of phi exactly on
// the near field (0, eps) and a piecewise linear one on [eps, Y].  Every grid
// operator is a linear combination of the same increments, so the extended
// product rule D[fg] = f D[g] + g D[f] - Lambda[f, g] holds to rounding.
// Beyond Y the f(x) part of the integrand is integrated exactly; the f(x -+ y)
// part is either dropped (zero boundary, with a reported bound) or replaced by
// the period mean (periodic boundary).

#include "fracmul/core.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace fracmul {

enum class Sign { plus, minus };
enum class Boundary { zero, periodic };

/// alpha / Gamma(1 - alpha).
double fractional_prefactor(double alpha);

struct FracParams {
    double alpha;
    double near_cut;  // eps
    double far_cut;   // Y
    Boundary boundary = Boundary::zero;
    /// The far-field model covers (Y, outer_cut); infinity for the full operators,
    /// outer_cut == Y for an integral truncated at Y.
    double outer_cut = INFINITY;

    /// Throws InvalidParameter unless 0 < alpha < 1 and 0 < near_cut < far_cut.
    FracParams(double alpha, double near_cut, double far_cut, Boundary boundary = Boundary::zero);

    /// eps = 8 spacing, Y = half_width / 2.
    static FracParams defaults(double alpha, const GridSpec& grid);
};

/// Node weights of the singular rule, in physical units.
struct SingularWeights {
    std::vector<double> w;  // w[k] multiplies phi(k h); w[0] == 0
    double spacing;
    double cutoff;          // Y actually used
    double far_moment;      // int_Y^inf y^(-1-a) dy = Y^(-a)/a
    double total() const;   // sum of w
};

SingularWeights singular_weights(double alpha, double spacing, double near_cut, double far_cut);

struct FracResult {
    SampledFunction values;
    /// Bound on the part of the far field that was not integrated.
    double tail_bound = 0.0;
    /// Points in [valid_begin, valid_end) are at least Y from the edge the rule reads from.
    std::size_t valid_begin = 0;
    std::size_t valid_end = 0;

    bool edge_warning() const { return valid_begin > 0 || valid_end < values.size(); }
};

FracResult d_alpha(const SampledFunction& f, const FracParams& p);
FracResult d_alpha_neg(const SampledFunction& f, const FracParams& p);
FracResult d_alpha_signed(const SampledFunction& f, const FracParams& p, Sign sign);

/// L f = -D_a f - D_a^- f.
FracResult generator_L(const SampledFunction& f, const FracParams& p);
/// a/Gamma(1-a) int_{R\0} (f(x+y) - f(x)) |y|^(-1-a) dy evaluated as one
/// two-sided convolution, independent of d_alpha / d_alpha_neg.
FracResult generator_L_direct(const SampledFunction& f, const FracParams& p);

FracResult lambda_alpha(const SampledFunction& f, const SampledFunction& g, const FracParams& p);
FracResult lambda_alpha_neg(const SampledFunction& f, const SampledFunction& g, const FracParams& p);
FracResult lambda_alpha_signed(const SampledFunction& f, const SampledFunction& g, const FracParams& p, Sign sign);

/// (i xi)^a for plus, (-i xi)^a for minus; principal branch, zero at xi = 0.
Complex d_alpha_symbol(double xi, double alpha, Sign sign);
SampledFunction spectral_d_alpha(const SampledFunction& f, double alpha, Sign sign);

/// sup |D[fg] - (f D[g] + g D[f] - Lambda[f, g])| over the grid.
double product_rule_residual(const SampledFunction& f, const SampledFunction& g, const FracParams& p, Sign sign);

// Pointwise evaluation on functions known on all of R.

using RealLineFunction = std::function<Complex(double)>;

struct PointwiseOptions {
    double near_cut = 1e-2;
    double far_cut = 1e12;
    /// Points where f is not smooth; the quadrature is graded toward them.
    std::vector<double> singular_points;
    /// Exact derivative, used for the innermost Taylor sliver.
    std::function<std::optional<Complex>(double)> derivative;
    /// Limits of f at -inf and +inf.  When known, the far field beyond far_cut
    /// is approximated by them instead of being dropped.
    std::optional<std::array<Complex, 2>> limits;
};

struct PointwiseValue {
    Complex value;
    double tail_bound;  // dropped far field per unit sup|f|
};

/// D_a f(x) (plus) or D_a^- f(x) (minus) by graded Gauss-Legendre quadrature.
PointwiseValue d_alpha_at(const RealLineFunction& f, double x, double alpha, Sign sign,
                          const PointwiseOptions& opt = {});
/// L f(x) from the two-sided integrand f(x+y) + f(x-y) - 2 f(x).
PointwiseValue generator_at(const RealLineFunction& f, double x, double alpha, const PointwiseOptions& opt = {});

}  // namespace fracmul
