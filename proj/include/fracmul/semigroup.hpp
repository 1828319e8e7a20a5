#pragma once

// Symmetric stable densities p(t, x, 0) with symbol exp(-t|xi|^a), the
// Brownian half-line exit law mu_t, the subordinated kernel q_t with symbol
// exp(-t|xi|^(a/2)), the harmonic extension Q_t, and Monte-Carlo sampling of
// stable increments.

#include "fracmul/core.hpp"
#include "fracmul/multiplier_spec.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace fracmul {

/// What to do when a kernel symbol has not decayed at the Nyquist frequency.
enum class Resolution { enforce, report };

/// Symbol value at Nyquist relative to its value at 0 below which a kernel counts as resolved.
inline constexpr double kResolutionThreshold = 1e-12;

/// exp(-t nu^exponent) at the grid Nyquist frequency nu.
double nyquist_residual(double t, double exponent, const GridSpec& grid);

/// Inverse transform of exp(-t|xi|^alpha).  Throws ResolutionError under
/// Resolution::enforce when the symbol exceeds kResolutionThreshold at Nyquist.
SampledFunction stable_density(double t, double alpha, const GridSpec& grid,
                               Resolution policy = Resolution::enforce);

/// t/(2 sqrt(pi)) exp(-t^2/(4s)) s^(-3/2).
double exit_density(double t, double s);
/// mu_t((s, inf)) = erf(t / (2 sqrt(s))).
double exit_tail_mass(double t, double s);

/// Inverse transform of exp(-t|xi|^(alpha/2)); t = 0 gives the discrete delta.
SampledFunction q_kernel_spectral(double t, double alpha, const GridSpec& grid,
                                  Resolution policy = Resolution::enforce);

struct SubordinationParams {
    double alpha;
    double t;
    std::size_t s_quad = 256;

    SubordinationParams(double alpha, double t, std::size_t s_quad = 256);
};

struct SubordinationResult {
    SampledFunction kernel;
    double s_min;
    double s_max;
    double excluded_mass;   // mu_t mass outside [s_min, s_max]
    double refinement_gap;  // sup over frequencies of |Richardson - fine midpoint|
    std::size_t nodes;      // nodes of the fine level
};

/// sum_i w_i mu_t(s_i) p(s_i, ., 0) over log-spaced s nodes; composite midpoint
/// in log s at s_quad and 2 s_quad nodes combined by Richardson extrapolation.
/// Each p(s_i) is built at the grid's resolution (Resolution::report), so the
/// result matches q_kernel_spectral with the same truncation.  Throws
/// ConvergenceError when the two levels disagree by more than 1e-6.
SubordinationResult q_kernel_subordinated(const SubordinationParams& p, const GridSpec& grid);

/// Q_t f: spectral multiplication by exp(-t|xi|^(alpha/2)); t = 0 returns f.
SampledFunction harmonic_extension(const SampledFunction& f, double t, double alpha);

/// K(x) = |x|^(a/2) exp(-|x|^(a/2) / 2).
double k_func(double x, double alpha);
/// K_s(x) = |x|^(a/2) exp(-s |x|^(a/2) / 2).
double k_s_func(double x, double s, double alpha);

/// Inverse transform of -(1/2)|xi|^(a/2) exp(-(s/2)|xi|^(a/2)) m(xi), the kernel
/// of d/ds Q_{s/2} T_m.
SampledFunction ds_q_half_kernel(const MultiplierSpec& m, double s, double alpha, const GridSpec& grid);

/// Seed with deterministic splitting into independent child streams.
struct RngSeed {
    std::uint64_t seed = 0;

    /// Child seed for task `index` (SplitMix64 of seed and index).
    RngSeed split(std::uint64_t index) const;
    std::mt19937_64 engine() const { return std::mt19937_64(seed); }
};

/// Uniform on (0, 1) with 53 random bits.
double uniform_open(std::mt19937_64& engine);

/// n i.i.d. symmetric stable variables with characteristic function
/// exp(-t|xi|^alpha) (Chambers-Mallows-Stuck).
std::vector<double> sample_stable(double alpha, double t, std::size_t n, RngSeed seed);

struct McGeneratorResult {
    double estimate;
    double stderr_;
    double reference;         // generator_L(f)(x)
    double kappa_norm;        // measured symbol ratio of the stable generator to generator_L
    double bias;              // |(P_t f(x) - f(x))/t - kappa_norm * reference|, computed spectrally
    double expected_kappa;    // 1 / (2 cos(alpha pi / 2)), for comparison only
};

/// Monte-Carlo estimate of (E f(x + X_t) - f(x)) / t with X_t from sample_stable,
/// f read through a cubic B-spline of its real samples (zero outside the grid).
/// Throws InvalidParameter if x lies outside the grid or f is not real.
McGeneratorResult mc_generator_check(const SampledFunction& f, double x, double alpha, double t, std::size_t n,
                                     RngSeed seed);

}  // namespace fracmul
