#pragma once

// Fixed-order Gauss-Legendre panels and geometrically graded composite rules
// for integrands with endpoint singularities or slowly decaying tails.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace fracmul::quad {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Cached rule with the given number of points (computed by Newton iteration).
const GaussLegendre& gauss_legendre(std::size_t points);

template <class F>
auto panel(F&& f, double a, double b, const GaussLegendre& rule) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    decltype(f(mid)) sum{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

enum class Grade { left, right, both, none };

struct GradedOptions {
    double ratio = 2.0;            // width ratio of neighbouring panels
    double smallest = 1e-14;       // innermost panel width relative to (b - a)
    std::size_t points = 16;
    std::size_t uniform_panels = 4;  // used by Grade::none
};

/// Composite Gauss-Legendre on [a, b] with panels shrinking geometrically toward
/// the graded end(s).  Integrable power singularities at a graded end are handled
/// to roughly the relative size of the innermost panel.
template <class F>
auto graded(F&& f, double a, double b, Grade grade, const GradedOptions& opt = {}) {
    using T = decltype(f(a));
    T sum{};
    if (!(b > a)) return sum;
    const auto& rule = gauss_legendre(opt.points);
    const double width = b - a;
    if (grade == Grade::none) {
        const double h = width / static_cast<double>(opt.uniform_panels);
        for (std::size_t i = 0; i < opt.uniform_panels; ++i) sum += panel(f, a + i * h, a + (i + 1) * h, rule);
        return sum;
    }
    if (grade == Grade::both) {
        const double mid = 0.5 * (a + b);
        GradedOptions half = opt;
        sum += graded(f, a, mid, Grade::left, half);
        sum += graded(f, mid, b, Grade::right, half);
        return sum;
    }
    // Panels [a + w r^{-(i+1)}, a + w r^{-i}] (mirrored for Grade::right).
    double outer = 1.0;
    while (outer > opt.smallest) {
        const double inner = outer / opt.ratio;
        double lo, hi;
        if (grade == Grade::left) {
            lo = a + width * inner;
            hi = a + width * outer;
        } else {
            lo = b - width * outer;
            hi = b - width * inner;
        }
        sum += panel(f, lo, hi, rule);
        outer = inner;
    }
    if (grade == Grade::left)
        sum += panel(f, a, a + width * outer, rule);
    else
        sum += panel(f, b - width * outer, b, rule);
    return sum;
}

/// Geometric panels [a r^i, a r^{i+1}] covering [a, b] with a > 0; suited to
/// algebraically decaying integrands.
template <class F>
auto geometric(F&& f, double a, double b, double ratio = 2.0, std::size_t points = 16) {
    using T = decltype(f(a));
    T sum{};
    const auto& rule = gauss_legendre(points);
    double lo = a;
    while (lo < b) {
        const double hi = std::min(b, lo * ratio);
        sum += panel(f, lo, hi, rule);
        lo = hi;
    }
    return sum;
}

/// int_a^b of f over a segment, graded toward the ends flagged singular.
template <class F>
auto breakpoint_segment(const F& f, double a, double b, bool sing_a, bool sing_b) {
    using T = decltype(f(a));
    if (!(b > a)) return T{};
    if (sing_a && sing_b) {
        const double mid = 0.5 * (a + b);
        return breakpoint_segment(f, a, mid, true, false) + breakpoint_segment(f, mid, b, false, true);
    }
    const double width = b - a;
    GradedOptions opt;
    opt.smallest = 1e-12;
    if (sing_a) {
        const double d = std::min(width, a);
        T s = graded(f, a, a + d, Grade::left, opt);
        if (a + d < b) s += geometric(f, a + d, b);
        return s;
    }
    if (sing_b) {
        const double d = std::min(0.5 * width, 0.5 * b);
        T s = graded(f, b - d, b, Grade::right, opt);
        if (b - d > a) s += geometric(f, a, b - d);
        return s;
    }
    return geometric(f, a, b);
}

/// int_0^far_cut phi(y) y^(-1-alpha) dy for phi(y) ~ slope * y near 0, with
/// `breaks` (positive y) where phi is not smooth.  The innermost sliver
/// (0, 1e-6 * eps) uses the linear Taylor term, eps = min(near_cut, first break / 2).
template <class Phi, class T>
T halfline_singular(const Phi& phi, T slope, double alpha, double near_cut, double far_cut,
                    std::vector<double> breaks) {
    double nearest = far_cut;
    for (double b : breaks) nearest = std::min(nearest, b);
    const double eps = std::min(near_cut, 0.5 * nearest);
    auto integrand = [&](double y) -> T { return phi(y) * std::pow(y, -1.0 - alpha); };

    // Below s0 the rounding error of phi, amplified by y^(-1-a), outweighs the
    // second-order Taylor remainder.
    const double s0 = eps * 1e-6;
    T total = slope * (std::pow(s0, 1.0 - alpha) / (1.0 - alpha));
    GradedOptions opt;
    opt.smallest = 1e-6;
    total += graded(integrand, s0, eps, Grade::left, opt);

    std::sort(breaks.begin(), breaks.end());
    std::vector<double> cuts{eps};
    for (double b : breaks)
        if (b > eps && b < far_cut) cuts.push_back(b);
    cuts.push_back(far_cut);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const bool sing_lo = i > 0;
        const bool sing_hi = i + 2 < cuts.size();
        total += breakpoint_segment(integrand, cuts[i], cuts[i + 1], sing_lo, sing_hi);
    }
    return total;
}

}  // namespace fracmul::quad
