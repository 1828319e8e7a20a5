#include "fracmul/semigroup.hpp"

#include "fracmul/error.hpp"
#include "fracmul/fracderiv.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace fracmul {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
}

void check_resolution(double t, double exponent, const GridSpec& grid, Resolution policy, const char* what) {
    if (policy == Resolution::report) return;
    const double r = nyquist_residual(t, exponent, grid);
    if (r > kResolutionThreshold) {
        std::ostringstream msg;
        msg << what << ": symbol is " << r << " at the Nyquist frequency " << grid.nyquist()
            << " (needs <= " << kResolutionThreshold << "); refine the grid";
        throw ResolutionError(msg.str());
    }
}

SampledFunction real_part_only(SampledFunction k) {
    for (auto& v : k.values()) v = v.real();
    return k;
}

}  // namespace

double nyquist_residual(double t, double exponent, const GridSpec& grid) {
    return std::exp(-t * std::pow(grid.nyquist(), exponent));
}

SampledFunction stable_density(double t, double alpha, const GridSpec& grid, Resolution policy) {
    check_alpha(alpha);
    if (!(t > 0.0)) throw InvalidParameter("stable density needs t > 0");
    check_resolution(t, alpha, grid, policy, "stable density");
    return real_part_only(
        kernel_from_symbol([t, alpha](double xi) { return std::exp(-t * std::pow(std::abs(xi), alpha)); }, grid));
}

double exit_density(double t, double s) {
    if (!(t > 0.0)) throw InvalidParameter("exit density needs t > 0");
    if (!(s > 0.0)) throw InvalidParameter("exit density needs s > 0");
    return t / (2.0 * std::sqrt(std::numbers::pi)) * std::exp(-t * t / (4.0 * s)) * std::pow(s, -1.5);
}

double exit_tail_mass(double t, double s) {
    if (!(t > 0.0 && s > 0.0)) throw InvalidParameter("exit tail mass needs t, s > 0");
    return std::erf(t / (2.0 * std::sqrt(s)));
}

SampledFunction q_kernel_spectral(double t, double alpha, const GridSpec& grid, Resolution policy) {
    check_alpha(alpha);
    if (t < 0.0) throw InvalidParameter("q kernel needs t >= 0");
    if (t == 0.0) {
        SampledFunction delta(grid);
        delta[grid.origin_index()] = 1.0 / grid.spacing();
        return delta;
    }
    check_resolution(t, alpha / 2.0, grid, policy, "q kernel");
    return real_part_only(kernel_from_symbol(
        [t, alpha](double xi) { return std::exp(-t * std::pow(std::abs(xi), alpha / 2.0)); }, grid));
}

SubordinationParams::SubordinationParams(double alpha_, double t_, std::size_t s_quad_)
    : alpha(alpha_), t(t_), s_quad(s_quad_) {
    check_alpha(alpha);
    if (!(t > 0.0)) throw InvalidParameter("subordination needs t > 0");
    if (s_quad < 64) throw InvalidParameter("subordination needs s_quad >= 64");
}

SubordinationResult q_kernel_subordinated(const SubordinationParams& p, const GridSpec& grid) {
    const double t = p.t;
    const double s_min = t * t * 1e-4;
    // Upper end where the remaining exit mass erf(t / (2 sqrt(s))) drops to 1e-8.
    const double s_max = t * t / (std::numbers::pi * 1e-16);
    const double lo = std::log(s_min), hi = std::log(s_max);

    // Linear in the stable densities, so the sum is accumulated on the symbols
    // exp(-s|xi|^a) and transformed once.
    auto midpoint = [&](std::size_t nodes) {
        std::vector<double> s(nodes), w(nodes);
        const double du = (hi - lo) / static_cast<double>(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            s[i] = std::exp(lo + (static_cast<double>(i) + 0.5) * du);
            w[i] = du * s[i] * exit_density(t, s[i]);
        }
        std::vector<double> sym(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double lam = std::pow(std::abs(grid.frequency(k)), p.alpha);
            double acc = 0.0;
            for (std::size_t i = 0; i < nodes; ++i) acc += w[i] * std::exp(-s[i] * lam);
            sym[k] = acc;
        }
        return sym;
    };
    const auto coarse = midpoint(p.s_quad);
    const auto fine = midpoint(2 * p.s_quad);
    std::vector<Complex> combined(grid.size());
    double gap = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double r = (4.0 * fine[k] - coarse[k]) / 3.0;
        gap = std::max(gap, std::abs(r - fine[k]));
        combined[k] = r;
    }
    if (gap > 1e-6) {
        std::ostringstream msg;
        msg << "subordination quadrature did not settle: levels " << p.s_quad << " and " << 2 * p.s_quad
            << " differ by " << gap << " in the symbol";
        throw ConvergenceError(msg.str());
    }
    auto kernel = inverse_transform(SpectralFunction(grid, std::move(combined)));
    kernel *= 1.0 / (std::sqrt(2.0 * std::numbers::pi));  // same normalization as kernel_from_symbol
    // Even by construction: symmetrize away FFT rounding.
    const std::size_t n = grid.size();
    for (std::size_t j = 1; j < n / 2; ++j) {
        const double v = 0.5 * (kernel[j].real() + kernel[n - j].real());
        kernel[j] = v;
        kernel[n - j] = v;
    }
    kernel[0] = kernel[0].real();
    kernel[n / 2] = kernel[n / 2].real();

    SubordinationResult out{std::move(kernel), s_min, s_max, 0.0, gap, 2 * p.s_quad};
    out.excluded_mass = std::erfc(t / (2.0 * std::sqrt(s_min))) + exit_tail_mass(t, s_max);
    return out;
}

SampledFunction harmonic_extension(const SampledFunction& f, double t, double alpha) {
    check_alpha(alpha);
    if (t < 0.0) throw InvalidParameter("harmonic extension needs t >= 0");
    if (t == 0.0) return f;
    return apply_symbol(f, [t, alpha](double xi) { return std::exp(-t * std::pow(std::abs(xi), alpha / 2.0)); });
}

double k_func(double x, double alpha) { return k_s_func(x, 1.0, alpha); }

double k_s_func(double x, double s, double alpha) {
    const double u = std::pow(std::abs(x), alpha / 2.0);
    return u * std::exp(-0.5 * s * u);
}

SampledFunction ds_q_half_kernel(const MultiplierSpec& m, double s, double alpha, const GridSpec& grid) {
    check_alpha(alpha);
    if (!(s > 0.0)) throw InvalidParameter("ds_q_half_kernel needs s > 0");
    return kernel_from_symbol(
        [&](double xi) {
            const double u = std::pow(std::abs(xi), alpha / 2.0);
            return -0.5 * u * std::exp(-0.5 * s * u) * m(xi);
        },
        grid);
}

RngSeed RngSeed::split(std::uint64_t index) const {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return {z ^ (z >> 31)};
}

double uniform_open(std::mt19937_64& engine) {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample_stable(double alpha, double t, std::size_t n, RngSeed seed) {
    check_alpha(alpha);
    if (!(t > 0.0)) throw InvalidParameter("sample_stable needs t > 0");
    if (n == 0) throw InvalidParameter("sample_stable needs n >= 1");
    auto engine = seed.engine();
    const double scale = std::pow(t, 1.0 / alpha);
    const double power = (1.0 - alpha) / alpha;
    std::vector<double> out(n);
    for (auto& x : out) {
        const double v = std::numbers::pi * (uniform_open(engine) - 0.5);
        const double w = -std::log(uniform_open(engine));
        x = scale * std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
            std::pow(std::cos((1.0 - alpha) * v) / w, power);
    }
    return out;
}

McGeneratorResult mc_generator_check(const SampledFunction& f, double x, double alpha, double t, std::size_t n,
                                     RngSeed seed) {
    check_alpha(alpha);
    const auto& grid = f.grid();
    const double x0 = grid.point(0), x1 = grid.point(grid.size() - 1);
    if (!(x >= x0 && x <= x1)) throw InvalidParameter("mc_generator_check: x lies outside the grid");
    if (f.max_imag() > 1e-12 * (1.0 + f.sup_norm())) throw InvalidParameter("mc_generator_check needs real f");
    if (!(t > 0.0)) throw InvalidParameter("mc_generator_check needs t > 0");

    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    auto spline_of = [&](const SampledFunction& g) {
        const auto re = g.real_part();
        return Spline(re.begin(), re.end(), x0, grid.spacing());
    };
    const Spline fs = spline_of(f);
    auto eval = [&](const Spline& s, double y) { return (y < x0 || y > x1) ? 0.0 : s(y); };

    const auto samples = sample_stable(alpha, t, n, seed);
    const double fx = eval(fs, x);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = (eval(fs, x + samples[i]) - fx) / t;
        const double delta = d - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (d - mean);
    }
    const double variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;

    const auto quad = generator_L(f, FracParams::defaults(alpha, grid));
    const auto symbolic =
        apply_symbol(f, [alpha](double xi) { return Complex(-std::pow(std::abs(xi), alpha)); });
    // Least-squares ratio over the points unaffected by the edges.
    double num = 0.0, den = 0.0;
    for (std::size_t j = quad.valid_begin; j < quad.valid_end; ++j) {
        num += symbolic[j].real() * quad.values[j].real();
        den += quad.values[j].real() * quad.values[j].real();
    }
    const double kappa = den > 0.0 ? num / den : std::nan("");

    const double reference = eval(spline_of(quad.values), x);
    const auto evolved = apply_symbol(f, [t, alpha](double xi) { return std::exp(-t * std::pow(std::abs(xi), alpha)); });
    const double drift = (eval(spline_of(evolved), x) - fx) / t;

    McGeneratorResult out;
    out.estimate = mean;
    out.stderr_ = std::sqrt(variance / static_cast<double>(n));
    out.reference = reference;
    out.kappa_norm = kappa;
    out.bias = std::abs(drift - kappa * reference);
    out.expected_kappa = 1.0 / (2.0 * std::cos(alpha * std::numbers::pi / 2.0));
    return out;
}

}  // namespace fracmul
