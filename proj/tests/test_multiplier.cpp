#include <doctest.h>

#include "fracmul/error.hpp"
#include "fracmul/multiplier.hpp"
#include "fracmul/semigroup.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

using namespace fracmul;

namespace {

const GridSpec small_grid(32.0, 1024);

double kk(double x, double a) {
    const double u = std::pow(std::abs(x), a / 2.0);
    return u * std::exp(-u / 2.0);
}

// Independent D_a[cos log](x) by tanh-sinh / exp-sinh with the prefactor; the
// first 1e-7 |x| of y uses the linear Taylor term.
double cos_log_d_alpha_oracle(double x, double a) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    auto m = [](double z) { return z == 0.0 ? 0.0 : std::cos(std::log(std::abs(z))); };
    auto g = [&](double y) { return (m(x) - m(x - y)) * std::pow(y, -1.0 - a); };
    const double ax = std::abs(x);
    const double y0 = 1e-7 * ax;
    const double slope = -std::sin(std::log(ax)) / x;
    double total = slope * std::pow(y0, 1.0 - a) / (1.0 - a);
    if (x > 0.0)
        total += ts.integrate(g, y0, 0.5 * x) + ts.integrate(g, 0.5 * x, x) + ts.integrate(g, x, 2.0 * x) +
                 es.integrate(g, 2.0 * x, INFINITY);
    else
        total += ts.integrate(g, y0, ax) + es.integrate(g, ax, INFINITY);
    return a / std::tgamma(1.0 - a) * total;
}

// The other root of K(z) = K(x), by bisection on log u - u/2.
double partner_oracle(double x, double a) {
    const double u0 = std::pow(x, a / 2.0);
    const double target = std::log(u0) - u0 / 2.0;
    auto g = [&](double u) { return std::log(u) - u / 2.0 - target; };
    double lo = u0 < 2.0 ? 2.0 : 1e-300, hi = u0 < 2.0 ? 1e6 : 2.0;
    for (int i = 0; i < 2000; ++i) {
        const double mid = u0 < 2.0 ? 0.5 * (lo + hi) : std::sqrt(lo * hi);
        ((g(mid) > 0.0) == (u0 < 2.0) ? lo : hi) = mid;
    }
    return std::pow(0.5 * (lo + hi), 2.0 / a);
}

double k_prime_oracle(double x, double a) {
    const double u = std::pow(x, a / 2.0);
    const double du = a / 2.0 * u / x;
    return std::exp(-u / 2.0) * (1.0 - u / 2.0) * du;
}

double j_oracle(double x, double a) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    const double kx = kk(x, a);
    auto g = [&](double y) {
        const double d = std::abs(kk(x - y, a) - kx) + std::abs(kk(x + y, a) - kx);
        return d == 0.0 ? 0.0 : d * std::pow(y, -1.0 - a);
    };
    // Below y0 the increments are 2|K'(x)| y to second order; rounding would
    // dominate a direct evaluation there.
    const double y0 = 1e-7 * x;
    const double p = partner_oracle(x, a);
    std::vector<double> cuts{y0, x, 2.0 * x, x + p, std::abs(p - x)};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double u, double v) { return std::abs(u - v) < 1e-9 * (1 + v); }),
               cuts.end());
    double total = 2.0 * std::abs(k_prime_oracle(x, a)) * std::pow(y0, 1.0 - a) / (1.0 - a);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += ts.integrate(g, cuts[i], cuts[i + 1]);
    return total + es.integrate(g, cuts.back(), INFINITY);
}

double j_norm_oracle(double a) {
    boost::math::quadrature::tanh_sinh<double> ts(10);
    boost::math::quadrature::exp_sinh<double> es(10);
    // Outside [lo, hi] J follows its power laws x^(-a/2) and x^(-1-a).
    const double lo = 1e-10, hi = 1e12;
    const double j_lo = j_oracle(lo, a), j_hi = j_oracle(hi, a);
    auto sq = [&](double x) {
        if (x <= 0.0) return 0.0;
        if (x < lo) return j_lo * j_lo * std::pow(lo / x, a);
        if (x > hi) return j_hi * j_hi * std::pow(hi / x, 2.0 + 2.0 * a);
        const double j = j_oracle(x, a);
        return j * j;
    };
    const double peak = std::pow(2.0, 2.0 / a);
    const double total = ts.integrate(sq, 0.0, peak, 1e-9) + es.integrate([&](double t) { return sq(peak + t); }, 1e-9);
    return std::sqrt(2.0 * total);
}

}  // namespace

TEST_CASE("classical condition") {
    const GridSpec g(128.0, 1 << 13);
    const double delta = 4.0 * g.spacing();
    CHECK_THROWS_AS(check_classical(MultiplierSpec::cos_log(), g, 0.0), InvalidParameter);

    const auto one = check_classical(MultiplierSpec::constant(), g, delta);
    CHECK(one.c_classical == 0.0);
    CHECK(one.verdict());

    // |x m'(x)| = |sin log|x||.
    const auto cl = check_classical(MultiplierSpec::cos_log(), g, delta);
    CHECK(cl.c_classical >= 0.99);
    CHECK(cl.c_classical <= 1.0 + 1e-6);
    CHECK(cl.verdict());
    CHECK(cl.m_inf == 1.0);

    // 2x^2/(1+x^2)^2 peaks at x = 1 with value 1/2.
    const auto rb = check_classical(MultiplierSpec::rational_bump(), g, delta);
    CHECK(rb.c_classical == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(rb.argmax) == 1.0);

    // Central differences on a tabulated tanh: sup x sech^2 x at 2x tanh x = 1.
    SampledTable t;
    for (int i = -400; i <= 400; ++i) {
        t.x.push_back(0.05 * i);
        t.value.emplace_back(std::tanh(0.05 * i));
    }
    const auto tab = check_classical(MultiplierSpec::sampled(t), GridSpec(16.0, 1 << 12), 0.05);
    CHECK(tab.c_classical == doctest::Approx(0.4477).epsilon(2e-3));
    CHECK(tab.verdict());

    const auto complex_m = check_classical(MultiplierSpec::cos_log().scaled(Complex(0.0, 1.0)), g, delta);
    CHECK_FALSE(complex_m.warnings.empty());
}

TEST_CASE("pointwise D_a of cos-log against an independent oracle") {
    const auto m = MultiplierSpec::cos_log();
    PointwiseOptions q;
    q.singular_points = {0.0};
    q.derivative = [m](double x) { return m.derivative(x); };
    const double a = 0.75;
    for (int i = 0; i < 20; ++i) {
        const double x = (i % 2 ? -1.0 : 1.0) * 0.05 * std::pow(1.6, i);
        const double ref = cos_log_d_alpha_oracle(x, a);
        const double got = d_alpha_at(m.as_symbol(), x, a, Sign::plus, q).value.real();
        CAPTURE(x);
        CHECK(got == doctest::Approx(ref).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("fractional condition") {
    const double delta = 4.0 * small_grid.spacing();
    FractionalOptions opt;
    opt.workers = 2;

    const auto one = check_fractional(MultiplierSpec::constant(), 0.75, Variant::generator, small_grid, delta, opt);
    CHECK(one.c_frac_plus == 0.0);
    CHECK(one.c_frac_minus == 0.0);
    CHECK(one.c_gen == 0.0);
    CHECK(one.verdict());

    const auto m = MultiplierSpec::cos_log();
    const auto gen = check_fractional(m, 0.75, Variant::generator, small_grid, delta, opt);
    CHECK(gen.verdict());
    CHECK(std::isfinite(gen.c_gen));
    CHECK(gen.generator_consistency <= 1e-6);
    // cos-log is even, so D_a m(-x) = D_a^- m(x).
    CHECK(gen.c_frac_plus == doctest::Approx(gen.c_frac_minus).epsilon(1e-12));

    // Homogeneity: doubling m doubles every constant exactly.
    const auto plus = check_fractional(m, 0.75, Variant::plus, small_grid, delta, opt);
    const auto twice = check_fractional(m.scaled(2.0), 0.75, Variant::plus, small_grid, delta, opt);
    CHECK(twice.c_frac_plus == 2.0 * plus.c_frac_plus);
    CHECK(std::isnan(plus.c_gen));
    CHECK(plus.c_frac_plus == gen.c_frac_plus);

    const auto low = check_fractional(m, 0.4, Variant::plus, small_grid, delta, opt);
    CHECK_FALSE(low.warnings.empty());
    CHECK_THROWS_AS(check_fractional(m, 1.0, Variant::plus, small_grid, delta, opt), InvalidParameter);
    CHECK(parse_variant("minus") == Variant::minus);
    CHECK_THROWS_AS(parse_variant("both"), InvalidParameter);
}

TEST_CASE("classical implies fractional") {
    const double delta = 4.0 * small_grid.spacing();
    InclusionOptions opt;
    opt.fractional.workers = 2;
    const auto one = classical_implies_fractional(MultiplierSpec::constant(), 0.75, small_grid, delta, opt);
    CHECK(one.verdict());
    for (auto m : {MultiplierSpec::cos_log(), MultiplierSpec::rational_bump()}) {
        const auto r = classical_implies_fractional(m, 0.75, small_grid, delta, opt);
        CHECK(r.verdict());
        CHECK(r.rows.back().name == "inclusion_ratio");
        CHECK(r.rows.back().value > 0.0);
    }
}

TEST_CASE("J function against direct quadrature") {
    for (double a : {0.6, 0.9})
        for (double x : {1e-3, 0.5, 3.0, 40.0, 2000.0}) {
            CAPTURE(a);
            CAPTURE(x);
            CHECK(j_function(x, a) == doctest::Approx(j_oracle(x, a)).epsilon(1e-8));
            CHECK(j_function(-x, a) == j_function(x, a));
        }
}

TEST_CASE("J norm") {
    // Frozen after agreement with the nested oracle.
    const std::vector<std::pair<double, double>> baselines{
        {0.6, 5.7417012614}, {0.75, 10.871380878}, {0.9, 44.364523751}};
    for (auto [a, value] : baselines) {
        const auto r = j_norm(a);
        CAPTURE(a);
        CHECK(r.cauchy);
        CHECK(r.history.size() == 3);
        CHECK(r.value == doctest::Approx(value).epsilon(1e-7));
    }
    for (double a : {0.55, 0.6, 0.75, 0.9, 0.95}) {
        CAPTURE(a);
        CHECK(j_norm(a).value == doctest::Approx(j_norm_oracle(a)).epsilon(1e-3));
    }
    // Outside the lemma's range the norm is still finite; no verdict is attached.
    const auto low = j_norm(0.4);
    CHECK(std::isfinite(low.value));
    CHECK_THROWS_AS(j_norm(1.2), InvalidParameter);
}

TEST_CASE("weighted kernel norm") {
    const double a = 0.75;
    CHECK(weighted_kernel_norm(MultiplierSpec::constant(0.0), a, 1.0) == 0.0);

    // Oracle: the periodized kernel as a directly summed cosine series, its
    // weighted square integrated with Gauss-Legendre panels.
    const WeightedNormOptions opt;
    const double dk = std::numbers::pi / opt.half_width;
    std::vector<double> coef;
    for (int k = 1;; ++k) {
        const double c = kk(k * dk, a);
        if (k * dk > 64.0 && c < 1e-4 * kk(std::pow(2.0, 2.0 / a), a)) break;
        coef.push_back(c);
    }
    auto kernel = [&](double z) {
        const Complex w = std::polar(1.0, dk * z);
        Complex p = w;
        double s = 0.0;
        for (double c : coef) {
            s += c * p.real();
            p *= w;
        }
        return dk / std::numbers::pi * s;
    };
    const int panels = 4000;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = opt.half_width * i / panels, hi = opt.half_width * (i + 1) / panels;
        sum += boost::math::quadrature::gauss<double, 16>::integrate(
            [&](double z) {
                const double v = kernel(z);
                return std::pow(1.0 + z, 2.0 * a) * v * v;
            },
            lo, hi);
    }
    const double oracle = 0.5 * std::sqrt(2.0 * sum);
    const double got = weighted_kernel_norm(MultiplierSpec::constant(), a, 1.0);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-4));

    // Grid doubling.
    WeightedNormOptions fine = opt;
    fine.n = 2 * weighted_norm_grid_size(a, opt);
    for (auto m : {MultiplierSpec::constant(), MultiplierSpec::cos_log()})
        CHECK(relative_change(weighted_kernel_norm(m, a, 0.7, opt), weighted_kernel_norm(m, a, 0.7, fine)) < 5e-3);

    // The scaled evaluation equals the physical one on the matching grid.
    const auto m = MultiplierSpec::cos_log();
    for (double s : {0.5, 2.0}) {
        const double sigma = std::pow(s, 2.0 / a);
        const GridSpec g(opt.half_width * sigma, weighted_norm_grid_size(a, opt));
        const auto k = ds_q_half_kernel(m, s, a, g);
        double acc = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            acc += std::pow(sigma + std::abs(g.point(j)), 2.0 * a) * std::norm(k[j]);
        CHECK(weighted_kernel_norm(m, a, s) == doctest::Approx(std::sqrt(acc * g.spacing())).epsilon(1e-10));
    }

    WeightedNormOptions coarse;
    coarse.n = 1024;
    CHECK_THROWS_AS(weighted_kernel_norm(m, a, 1.0, coarse), ResolutionError);
}

TEST_CASE("ratio scan") {
    const auto s = dyadic_s_values();
    REQUIRE(s.size() == 17);
    CHECK(s.front() == 0.0625);
    CHECK(s.back() == 16.0);

    const auto one = thm22_ratio_scan(MultiplierSpec::constant(), 0.75, s, {{Variant::plus, 1.0}});
    CHECK(one.verdict());
    CHECK(one.rows.back().value == doctest::Approx(1.0).epsilon(1e-10));

    const auto m = MultiplierSpec::cos_log();
    const auto r = thm22_ratio_scan(m, 0.75, s, {{Variant::plus, 1.0}, {Variant::generator, 0.7}});
    CHECK(r.verdict());
    CHECK(r.rows.size() == 2 * 18);

    // Invariance under m -> 2m with C1 -> 2 C1.
    const auto r2 = thm22_ratio_scan(m.scaled(2.0), 0.75, s, {{Variant::plus, 2.0}, {Variant::generator, 1.4}});
    for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r2.rows[i].value == r.rows[i].value);

    CHECK_THROWS_AS(thm22_ratio_scan(m, 0.75, s, {{Variant::plus, 0.0}}), InvalidParameter);
}

TEST_CASE("L^p stability") {
    const auto suite = lp_test_suite();
    REQUIRE(suite.size() == 20);
    const auto again = lp_test_suite();
    for (std::size_t i = 0; i < suite.size(); ++i) {
        CHECK(suite[i].name == again[i].name);
        CHECK(suite[i].fn(0.3) == again[i].fn(0.3));
    }
    CHECK(lp_test_suite(20, 1)[0].fn(0.3) != suite[0].fn(0.3));

    const GridSpec g(64.0, 1 << 12);
    const auto one = lp_stability_scan(MultiplierSpec::constant(), 1.5, suite, g);
    for (const auto& row : one.rows)
        if (row.name != "max_ratio") CHECK(row.value == doctest::Approx(1.0).epsilon(1e-10));

    const auto m = MultiplierSpec::cos_log();
    for (double p : {1.5, 2.0, 3.0}) {
        const auto r = lp_stability_scan(m, p, suite, g);
        CAPTURE(p);
        CHECK(r.verdict());
        if (p == 2.0) {
            CHECK(r.rows.back().name == "plancherel");
            CHECK(r.rows.back().value <= 1.0 + 1e-8);
        }
    }
    CHECK_THROWS_AS(lp_stability_scan(m, 1.0, suite, g), InvalidParameter);
}
