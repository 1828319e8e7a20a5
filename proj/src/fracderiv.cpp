#include "fracmul/fracderiv.hpp"

#include "fracmul/error.hpp"
#include "fracmul/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

namespace fracmul {

double fractional_prefactor(double alpha) { return alpha / std::tgamma(1.0 - alpha); }

FracParams::FracParams(double alpha_, double near_cut_, double far_cut_, Boundary boundary_)
    : alpha(alpha_), near_cut(near_cut_), far_cut(far_cut_), boundary(boundary_) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
    if (!(near_cut > 0.0)) throw InvalidParameter("near cut must be positive");
    if (!(far_cut > near_cut)) throw InvalidParameter("far cut must exceed the near cut");
    if (outer_cut < far_cut) throw InvalidParameter("outer cut must not be below the far cut");
}

FracParams FracParams::defaults(double alpha, const GridSpec& grid) {
    return FracParams(alpha, 8.0 * grid.spacing(), grid.half_width() / 2.0);
}

double SingularWeights::total() const { return std::accumulate(w.begin(), w.end(), 0.0); }

SingularWeights singular_weights(double alpha, double spacing, double near_cut, double far_cut) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
    if (near_cut < 2.0 * spacing * (1.0 - 1e-12))
        throw InvalidParameter("near cut must be at least twice the grid spacing");
    if (!(far_cut > near_cut)) throw InvalidParameter("far cut must exceed the near cut");

    // Work in units of the spacing: y = h u.
    double upper = far_cut / spacing;
    auto full = static_cast<std::size_t>(std::floor(upper + 1e-9));
    double partial = upper - static_cast<double>(full);
    if (partial < 1e-9) {
        partial = 0.0;
        upper = static_cast<double>(full);
    }
    auto near_nodes = static_cast<std::size_t>(std::ceil(near_cut / spacing - 1e-9));
    if (near_nodes % 2 == 1) ++near_nodes;
    if (near_nodes > full) near_nodes = full - (full % 2);
    if (near_nodes < 2) throw InvalidParameter("far cut must span at least two grid cells");

    std::vector<double> w(full + 2, 0.0);
    const double a = alpha;
    auto kernel = [a](double u) { return std::pow(u, -1.0 - a); };

    // First quadratic panel [0, 2]: the node at 0 carries phi(0) = 0.
    const double i1 = std::pow(2.0, 1.0 - a) / (1.0 - a);  // int_0^2 u^(-a)
    const double i2 = std::pow(2.0, 2.0 - a) / (2.0 - a);  // int_0^2 u^(1-a)
    w[1] += 2.0 * i1 - i2;
    w[2] += 0.5 * (i2 - i1);

    const auto& gl16 = quad::gauss_legendre(16);
    for (std::size_t p = 2; p < near_nodes; p += 2) {
        const double u0 = static_cast<double>(p);
        w[p] += quad::panel([&](double u) { return 0.5 * (u - u0 - 1.0) * (u - u0 - 2.0) * kernel(u); }, u0, u0 + 2.0, gl16);
        w[p + 1] += quad::panel([&](double u) { return -(u - u0) * (u - u0 - 2.0) * kernel(u); }, u0, u0 + 2.0, gl16);
        w[p + 2] += quad::panel([&](double u) { return 0.5 * (u - u0) * (u - u0 - 1.0) * kernel(u); }, u0, u0 + 2.0, gl16);
    }

    const auto& gl8 = quad::gauss_legendre(8);
    const auto& gl3 = quad::gauss_legendre(3);
    auto hat_cell = [&](std::size_t k, double hi) {
        const double lo = static_cast<double>(k);
        const auto& rule = k < 64 ? gl8 : gl3;
        w[k] += quad::panel([&](double u) { return (lo + 1.0 - u) * kernel(u); }, lo, hi, rule);
        w[k + 1] += quad::panel([&](double u) { return (u - lo) * kernel(u); }, lo, hi, rule);
    };
    for (std::size_t k = near_nodes; k < full; ++k) hat_cell(k, static_cast<double>(k) + 1.0);
    if (partial > 0.0) hat_cell(full, upper);

    if (partial == 0.0) w.pop_back();
    const double scale = std::pow(spacing, -a);
    for (auto& v : w) v *= scale;

    SingularWeights out;
    out.w = std::move(w);
    out.spacing = spacing;
    out.cutoff = upper * spacing;
    out.far_moment = std::pow(out.cutoff, -a) / a;
    return out;
}

namespace {

Complex mean(std::span<const Complex> v) {
    Complex s = 0.0;
    for (auto x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Applies the node rule to sampled data under either boundary treatment.
class Rule {
public:
    Rule(const GridSpec& grid, const FracParams& p)
        : weights_(singular_weights(p.alpha, grid.spacing(), p.near_cut, p.far_cut)),
          boundary_(p.boundary),
          n_(grid.size()),
          prefactor_(fractional_prefactor(p.alpha)),
          total_(weights_.total()),
          far_(p.outer_cut > weights_.cutoff
                   ? weights_.far_moment - std::pow(p.outer_cut, -p.alpha) / p.alpha
                   : 0.0) {}

    double prefactor() const { return prefactor_; }
    double total() const { return total_; }
    double far() const { return far_; }
    Boundary boundary() const { return boundary_; }
    std::size_t reach() const { return weights_.w.size() - 1; }

    /// sum_k w_k f_{j-k} (plus) or sum_k w_k f_{j+k} (minus).
    std::vector<Complex> shifted_sum(std::span<const Complex> f, Sign sign) const {
        if (boundary_ == Boundary::periodic) {
            const auto& kernel = sign == Sign::plus ? folded() : folded_reversed();
            return circular_convolution(f, kernel);
        }
        if (sign == Sign::plus) return causal_convolution(f, weights_.w);
        std::vector<Complex> reversed(f.rbegin(), f.rend());
        auto out = causal_convolution(reversed, weights_.w);
        std::reverse(out.begin(), out.end());
        return out;
    }

    /// sum_k w_k (f_{j-k} + f_{j+k}) as a single symmetric convolution.
    std::vector<Complex> symmetric_sum(std::span<const Complex> f) const {
        if (boundary_ == Boundary::periodic) {
            const auto& plus = folded();
            std::vector<Complex> kernel(n_);
            for (std::size_t r = 0; r < n_; ++r) kernel[r] = plus[r] + plus[(n_ - r) % n_];
            return circular_convolution(f, kernel);
        }
        const std::size_t reach_used = std::min(reach(), n_);
        const std::size_t m = std::bit_ceil(n_ + 2 * reach_used + 1);
        std::vector<Complex> padded(m), kernel(m);
        std::copy(f.begin(), f.end(), padded.begin());
        for (std::size_t k = 1; k <= reach_used; ++k) {
            kernel[k] += weights_.w[k];
            kernel[m - k] += weights_.w[k];
        }
        auto out = circular_convolution(padded, kernel);
        out.resize(n_);
        return out;
    }

    std::pair<std::size_t, std::size_t> valid_range(Sign sign) const {
        if (boundary_ == Boundary::periodic) return {0, n_};
        const std::size_t r = std::min(reach(), n_);
        return sign == Sign::plus ? std::make_pair(r, n_) : std::make_pair(std::size_t{0}, n_ - r);
    }

private:
    const std::vector<Complex>& folded() const {
        if (folded_.empty()) {
            folded_.assign(n_, 0.0);
            for (std::size_t k = 1; k < weights_.w.size(); ++k) folded_[k % n_] += weights_.w[k];
        }
        return folded_;
    }
    const std::vector<Complex>& folded_reversed() const {
        if (folded_reversed_.empty()) {
            const auto& f = folded();
            folded_reversed_.resize(n_);
            for (std::size_t r = 0; r < n_; ++r) folded_reversed_[r] = f[(n_ - r) % n_];
        }
        return folded_reversed_;
    }

    SingularWeights weights_;
    Boundary boundary_;
    std::size_t n_;
    double prefactor_;
    double total_;
    double far_;
    mutable std::vector<Complex> folded_;
    mutable std::vector<Complex> folded_reversed_;
};

void check_near_cut(const SampledFunction& f, const FracParams& p) {
    if (p.near_cut < 2.0 * f.grid().spacing() * (1.0 - 1e-12))
        throw InvalidParameter("near cut must be at least twice the grid spacing");
    if (p.outer_cut < p.far_cut) throw InvalidParameter("outer cut must not be below the far cut");
}

FracResult derivative_with(const Rule& rule, const SampledFunction& f, Sign sign) {
    const auto values = f.values();
    const auto shifted = rule.shifted_sum(values, sign);
    const double c = rule.prefactor();
    const Complex fbar = rule.boundary() == Boundary::periodic ? mean(values) : Complex(0.0);
    std::vector<Complex> out(values.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = c * (rule.total() * values[j] - shifted[j] + rule.far() * (values[j] - fbar));
    FracResult result{SampledFunction(f.grid(), std::move(out))};
    double spread = 0.0;
    for (auto v : values) spread = std::max(spread, std::abs(v - fbar));
    result.tail_bound = c * rule.far() * spread;
    std::tie(result.valid_begin, result.valid_end) = rule.valid_range(sign);
    return result;
}

FracResult lambda_with(const Rule& rule, const SampledFunction& f, const SampledFunction& g, Sign sign) {
    if (!(f.grid() == g.grid())) throw InvalidParameter("grid mismatch");
    const auto fv = f.values();
    const auto gv = g.values();
    const auto fg = pointwise_product(f, g);
    const auto wf = rule.shifted_sum(fv, sign);
    const auto wg = rule.shifted_sum(gv, sign);
    const auto wfg = rule.shifted_sum(fg.values(), sign);
    const double c = rule.prefactor();
    const bool periodic = rule.boundary() == Boundary::periodic;
    const Complex fbar = periodic ? mean(fv) : Complex(0.0);
    const Complex gbar = periodic ? mean(gv) : Complex(0.0);
    const Complex fgbar = periodic ? mean(fg.values()) : Complex(0.0);
    std::vector<Complex> out(fv.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        // Written symmetrically in (f, g) so that swapping the arguments is exact.
        const Complex prod = fv[j] * gv[j];
        const Complex near_mid = rule.total() * prod - (fv[j] * wg[j] + gv[j] * wf[j]) + wfg[j];
        const Complex far = prod - (fv[j] * gbar + gv[j] * fbar) + fgbar;
        out[j] = c * (near_mid + rule.far() * far);
    }
    FracResult result{SampledFunction(f.grid(), std::move(out))};
    result.tail_bound = c * rule.far() * 2.0 * f.sup_norm() * 2.0 * g.sup_norm();
    std::tie(result.valid_begin, result.valid_end) = rule.valid_range(sign);
    return result;
}

}  // namespace

FracResult d_alpha_signed(const SampledFunction& f, const FracParams& p, Sign sign) {
    check_near_cut(f, p);
    return derivative_with(Rule(f.grid(), p), f, sign);
}

FracResult d_alpha(const SampledFunction& f, const FracParams& p) { return d_alpha_signed(f, p, Sign::plus); }
FracResult d_alpha_neg(const SampledFunction& f, const FracParams& p) { return d_alpha_signed(f, p, Sign::minus); }

FracResult generator_L(const SampledFunction& f, const FracParams& p) {
    check_near_cut(f, p);
    const Rule rule(f.grid(), p);
    auto plus = derivative_with(rule, f, Sign::plus);
    auto minus = derivative_with(rule, f, Sign::minus);
    SampledFunction values = -1.0 * (plus.values + minus.values);
    FracResult result{std::move(values)};
    result.tail_bound = plus.tail_bound + minus.tail_bound;
    result.valid_begin = std::max(plus.valid_begin, minus.valid_begin);
    result.valid_end = std::min(plus.valid_end, minus.valid_end);
    return result;
}

FracResult generator_L_direct(const SampledFunction& f, const FracParams& p) {
    check_near_cut(f, p);
    const Rule rule(f.grid(), p);
    const auto values = f.values();
    const auto both = rule.symmetric_sum(values);
    const double c = rule.prefactor();
    const Complex fbar = rule.boundary() == Boundary::periodic ? mean(values) : Complex(0.0);
    std::vector<Complex> out(values.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = c * (both[j] - 2.0 * rule.total() * values[j] - 2.0 * rule.far() * (values[j] - fbar));
    FracResult result{SampledFunction(f.grid(), std::move(out))};
    double spread = 0.0;
    for (auto v : values) spread = std::max(spread, std::abs(v - fbar));
    result.tail_bound = 2.0 * c * rule.far() * spread;
    const auto [b1, e1] = rule.valid_range(Sign::plus);
    const auto [b2, e2] = rule.valid_range(Sign::minus);
    result.valid_begin = std::max(b1, b2);
    result.valid_end = std::min(e1, e2);
    return result;
}

FracResult lambda_alpha_signed(const SampledFunction& f, const SampledFunction& g, const FracParams& p, Sign sign) {
    check_near_cut(f, p);
    return lambda_with(Rule(f.grid(), p), f, g, sign);
}

FracResult lambda_alpha(const SampledFunction& f, const SampledFunction& g, const FracParams& p) {
    return lambda_alpha_signed(f, g, p, Sign::plus);
}

FracResult lambda_alpha_neg(const SampledFunction& f, const SampledFunction& g, const FracParams& p) {
    return lambda_alpha_signed(f, g, p, Sign::minus);
}

Complex d_alpha_symbol(double xi, double alpha, Sign sign) {
    if (xi == 0.0) return 0.0;
    const double s = (xi > 0.0 ? 1.0 : -1.0) * (sign == Sign::plus ? 1.0 : -1.0);
    return std::pow(std::abs(xi), alpha) * std::polar(1.0, s * alpha * std::numbers::pi / 2.0);
}

SampledFunction spectral_d_alpha(const SampledFunction& f, double alpha, Sign sign) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
    return apply_symbol(f, [alpha, sign](double xi) { return d_alpha_symbol(xi, alpha, sign); });
}

double product_rule_residual(const SampledFunction& f, const SampledFunction& g, const FracParams& p, Sign sign) {
    check_near_cut(f, p);
    const Rule rule(f.grid(), p);
    const auto fg = pointwise_product(f, g);
    const auto d_fg = derivative_with(rule, fg, sign);
    const auto d_f = derivative_with(rule, f, sign);
    const auto d_g = derivative_with(rule, g, sign);
    const auto lam = lambda_with(rule, f, g, sign);
    double worst = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const Complex rhs = f[j] * d_g.values[j] + g[j] * d_f.values[j] - lam.values[j];
        worst = std::max(worst, std::abs(d_fg.values[j] - rhs));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation.

namespace {

Complex slope_at(const RealLineFunction& f, double x, const PointwiseOptions& opt, double step) {
    if (opt.derivative)
        if (auto d = opt.derivative(x)) return *d;
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace

PointwiseValue d_alpha_at(const RealLineFunction& f, double x, double alpha, Sign sign, const PointwiseOptions& opt) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
    if (!(opt.near_cut > 0.0 && opt.far_cut > opt.near_cut)) throw InvalidParameter("need 0 < near cut < far cut");
    const double dir = sign == Sign::plus ? -1.0 : 1.0;  // f(x + dir * y)
    const Complex fx = f(x);
    std::vector<double> breaks;
    for (double s : opt.singular_points) {
        const double y = dir * (s - x);
        if (y > 0.0) breaks.push_back(y);
    }
    auto phi = [&](double y) { return fx - f(x + dir * y); };
    const Complex deriv = slope_at(f, x, opt, opt.near_cut * 1e-6);
    // phi(y) ~ -dir * f'(x) * y near 0.
    const Complex integral = quad::halfline_singular(phi, -dir * deriv, alpha, opt.near_cut, opt.far_cut, breaks);
    const double c = fractional_prefactor(alpha);
    const double far = std::pow(opt.far_cut, -alpha) / alpha;
    const Complex beyond = opt.limits ? (*opt.limits)[sign == Sign::plus ? 0 : 1] : Complex{};
    return {c * (integral + (fx - beyond) * far), c * far};
}

PointwiseValue generator_at(const RealLineFunction& f, double x, double alpha, const PointwiseOptions& opt) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
    const Complex fx = f(x);
    std::vector<double> breaks;
    for (double s : opt.singular_points)
        if (s != x) breaks.push_back(std::abs(s - x));
    auto phi = [&](double y) { return f(x + y) + f(x - y) - 2.0 * fx; };
    // The linear Taylor terms cancel in the symmetric increment.
    const Complex integral = quad::halfline_singular(phi, Complex{}, alpha, opt.near_cut, opt.far_cut, breaks);
    const double c = fractional_prefactor(alpha);
    const double far = std::pow(opt.far_cut, -alpha) / alpha;
    const Complex beyond = opt.limits ? (*opt.limits)[0] + (*opt.limits)[1] : Complex{};
    return {c * (integral + (beyond - 2.0 * fx) * far), 2.0 * c * far};
}

}  // namespace fracmul
