#pragma once

// Mikhlin-type conditions on a multiplier m and related L^p-bound quantities:
//
//     classical    sup |x| |m'(x)|
//     fractional   sup |x|^a |D m(x)|,  D in {D_a, D_a^-, L}
//     J-norm       || int |K(x-y) - K(x)| |y|^(-1-a) dy ||_{L^2(dx)}
//     weighted     || (s^(2/a) + |x|)^a d/ds Q_{s/2} kappa ||_{L^2}
//
// Fractional derivatives of m are taken pointwise with the graded quadrature
// of fracderiv, because m is not integrable and does not decay.

#include "fracmul/core.hpp"
#include "fracmul/fracderiv.hpp"
#include "fracmul/lpaley.hpp"
#include "fracmul/multiplier_spec.hpp"
#include "fracmul/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fracmul {

enum class Variant { plus, minus, generator };
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct ConditionReport {
    std::string multiplier;
    std::string condition = "classical";  // or the variant name
    double alpha = 0.0;  // 0 for the classical condition
    double m_inf = 0.0;
    double c_classical = 0.0;
    /// Fractional constants; NaN when the variant was not requested.
    double c_frac_plus = NAN;
    double c_frac_minus = NAN;
    double c_gen = NAN;
    double delta = 0.0;              // suprema over |x| >= delta
    double argmax = 0.0;             // where the headline constant is attained
    std::vector<std::size_t> grids_used;
    std::vector<double> history;     // headline constant per refinement level
    double refinement_tol = 0.0;
    /// sup |L m + D_a m + D_a^- m| |x|^a when the generator was checked directly.
    double generator_consistency = NAN;
    bool finite = true;
    bool stable = true;
    std::vector<std::string> warnings;

    bool verdict() const { return finite && stable; }
    /// The constant of the requested variant (or c_classical).
    double headline() const;
};

Json to_json(const ConditionReport& r);

/// sup over grid points with |x| >= delta of |x| |m'(x)|, using the closed-form
/// derivative when m has one and central differences otherwise; repeated on
/// grid.refined() for the stability flag.
ConditionReport check_classical(const MultiplierSpec& m, const GridSpec& grid, double delta,
                                double refinement_tol = 1e-3);

struct FractionalOptions {
    /// Near cut and far cut of the pointwise quadrature; the refined level halves near_cut.
    PointwiseOptions quadrature{};
    double refinement_tol = 0.02;
    std::size_t workers = 1;
};

/// sup over grid points with |x| >= delta of |x|^a |D m(x)|.  The refined level
/// doubles the grid and halves the near cut.
ConditionReport check_fractional(const MultiplierSpec& m, double alpha, Variant variant, const GridSpec& grid,
                                 double delta, const FractionalOptions& opt = {});

struct InclusionOptions {
    double slack = 20.0;
    FractionalOptions fractional{};
};

/// check_classical, then check_fractional (plus); passes when both are stable and
/// c_frac_plus <= slack (1 + c_classical + m_inf).
VerificationReport classical_implies_fractional(const MultiplierSpec& m, double alpha, const GridSpec& grid,
                                                double delta, const InclusionOptions& opt = {});

/// K(x) = |x|^(a/2) exp(-|x|^(a/2)/2) and the pointwise J(x)
/// (no a/Gamma(1-a) prefactor).
double j_function(double x, double alpha);

struct JNormOptions {
    double x_min = 1e-8;
    double x_max = 0.0;           // 0: where K and J^2 are negligible, chosen from alpha
    std::size_t panels_per_decade = 4;
    std::size_t levels = 3;       // each level doubles panels_per_decade
    double cauchy_tol = 0.01;
    std::size_t workers = 1;
};

struct JNormResult {
    double value;
    std::vector<double> history;
    bool cauchy;
};

/// ||J||_{L^2(R)} by log-spaced Gauss-Legendre panels in |x| (J is even) with
/// the analytic |x|^(-a) behaviour of J^2 below x_min and the x^(-2-2a) tail.
JNormResult j_norm(double alpha, const JNormOptions& opt = {});

struct WeightedNormOptions {
    double half_width = 4.0;  // in z = x / s^(2/a)
    /// 0 selects the smallest power of two meeting `resolution`.
    std::size_t n = 0;
    std::size_t max_n = std::size_t{1} << 22;
    /// Largest admissible K(nyquist) / max K.  The weighted L^2 norm is only
    /// perturbed at this relative order by the discarded frequencies.
    double resolution = 1e-8;
};

/// Grid size used for alpha under opt (after automatic selection).
std::size_t weighted_norm_grid_size(double alpha, const WeightedNormOptions& opt);

/// || (s^(2/a) + |x|)^a d/ds Q_{s/2} kappa ||_2, evaluated in z = x / s^(2/a) on
/// [-half_width, half_width), where it equals
///     s^(1-1/a)/2 * || (1+|z|)^a kernel_from_symbol(K(eta) m(eta / s^(2/a))) ||_2.
/// Throws ResolutionError if K is not resolved at the chosen grid size.
double weighted_kernel_norm(const MultiplierSpec& m, double alpha, double s, const WeightedNormOptions& opt = {});

struct ScanOptions {
    double ratio_bound = 10.0;
    double refinement_tol = 0.05;
    WeightedNormOptions grid{};
    std::size_t workers = 1;
};

/// R(s) = weighted_kernel_norm / (C1 s^(1-1/a)) for each s and each (variant, C1)
/// pair; verdict: sup/median <= ratio_bound and refinement change < refinement_tol.
VerificationReport thm22_ratio_scan(const MultiplierSpec& m, double alpha, const std::vector<double>& s_values,
                                    const std::vector<std::pair<Variant, double>>& constants,
                                    const ScanOptions& opt = {});

/// 2^(k/2), k = -8..8.
std::vector<double> dyadic_s_values();

/// Frozen suite of smooth test functions: Gaussians and (1 - u^2)^k bumps with
/// modulations, parameters drawn from the seed.
std::vector<NamedFunction> lp_test_suite(std::size_t count = 20, std::uint64_t seed = 20240611);

struct LpOptions {
    double bound_multiple = 50.0;  // max ratio must not exceed bound_multiple * max(C1, m_inf)
    double c1 = 1.0;
    double refinement_tol = 0.05;
    std::size_t workers = 1;
};

/// ||T_m f||_p / ||f||_p over the suite on grid and grid.refined().
VerificationReport lp_stability_scan(const MultiplierSpec& m, double p, const std::vector<NamedFunction>& suite,
                                     const GridSpec& grid, const LpOptions& opt = {});

}  // namespace fracmul
