#include <doctest.h>

#include "fracmul/error.hpp"
#include "fracmul/lpaley.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace fracmul;

namespace {

RealLineFunction bump_fn(double centre, double width, double freq) {
    return [=](double x) {
        const double u = (x - centre) / width;
        return Complex(std::exp(-u * u) * std::cos(freq * x));
    };
}

double max_abs_diff(const SampledFunction& a, const SampledFunction& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

}  // namespace

TEST_CASE("time quadrature") {
    CHECK_THROWS_AS(TimeQuadrature(1.0, 0.5, 64), InvalidParameter);
    CHECK_THROWS_AS(TimeQuadrature(1e-3, 1e3, 16), InvalidParameter);
    const TimeQuadrature tq;
    const auto w = tq.weights();
    const auto t = tq.points();
    double total = 0.0, inv = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        total += w[i];
        inv += w[i] / t[i];
    }
    CHECK(total == doctest::Approx(tq.t_max - tq.t_min).epsilon(1e-3));
    CHECK(inv == doctest::Approx(std::log(tq.t_max / tq.t_min)).epsilon(1e-12));
}

TEST_CASE("vertical square function") {
    const double alpha = 0.75;
    const GridSpec g(4.0 * std::numbers::pi, 256);
    CHECK(g_vertical(SampledFunction(g), alpha).values.sup_norm() == 0.0);

    // int_0^inf t a^2 exp(-2 t a) dt = 1/4 for a single mode.
    const auto wave = SampledFunction::from(g, [](double x) { return std::polar(1.0, x); });
    const auto up = g_vertical(wave, alpha);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(up.values[j].real() == doctest::Approx(0.5).epsilon(1e-5));

    const GridSpec h(32.0, 1 << 11);
    const auto f = SampledFunction::from(h, bump_fn(0.5, 1.0, 2.0));
    const auto a = g_vertical(f, alpha).values;
    const auto b = g_vertical(Complex(-3.0, 4.0) * f, alpha).values;
    for (std::size_t j = 0; j < h.size(); ++j) CHECK(std::abs(b[j]) == doctest::Approx(5.0 * std::abs(a[j])).epsilon(1e-12));
}

TEST_CASE("carre du champ") {
    const double alpha = 0.7;
    const GridSpec g(32.0, 1 << 12);
    FracParams p = FracParams::defaults(alpha, g);
    p.boundary = Boundary::periodic;
    const auto one = SampledFunction::from(g, [](double) { return Complex(1.0); });
    CHECK(carre_du_champ(one, p).sup_norm() < 1e-10);

    p.boundary = Boundary::zero;
    const auto u = SampledFunction::from(g, [](double x) { return Complex(std::exp(-x * x)); });
    const auto c = carre_du_champ(u, p);
    for (auto v : c.values()) CHECK(v.real() >= -1e-12);

    // Brute-force two-sided integral at the grid point x = 0.3125.
    const double x = 0.3125;
    auto integrand = [&](double y) {
        if (y < 1e-8) return 0.0;
        const double a = std::exp(-(x + y) * (x + y)) - std::exp(-x * x);
        const double b = std::exp(-(x - y) * (x - y)) - std::exp(-x * x);
        return (a * a + b * b) * std::pow(y, -1.0 - alpha);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    const double oracle = ts.integrate(integrand, 0.0, 3.0, 1e-12) + es.integrate(integrand, 3.0, INFINITY, 1e-12);
    const std::size_t j = g.origin_index() + static_cast<std::size_t>(std::lround(x / g.spacing()));
    CHECK(c[j].real() == doctest::Approx(oracle).epsilon(1e-4));

    // Truncating the domain can only lower it.
    FracParams q(alpha, p.near_cut, 1.0);
    q.outer_cut = 1.0;
    const auto inner = carre_du_champ(u, q);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(inner[k].real() <= c[k].real() + 1e-12);
}

TEST_CASE("horizontal and full square functions") {
    const double alpha = 0.75;
    const GridSpec g(32.0, 1 << 10);
    const TimeQuadrature tq(1e-3, 1e3, 64);
    const auto p = FracParams::defaults(alpha, g);
    CHECK(g_horizontal(SampledFunction(g), alpha, tq, p).values.sup_norm() == 0.0);
    const auto f = SampledFunction::from(g, bump_fn(0.0, 1.5, 1.0));
    const auto a = g_horizontal(f, alpha, tq, p).values;
    const auto b = g_horizontal(-2.0 * f, alpha, tq, p).values;
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(b[j]) == doctest::Approx(2.0 * std::abs(a[j])).epsilon(1e-10));
    const auto full = g_full(f, alpha, tq, p).values;
    const auto up = g_vertical(f, alpha, tq).values;
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(full[j].real() >= up[j].real());
    CHECK(g_full(SampledFunction(g), alpha, tq, p).values.sup_norm() == 0.0);
}

TEST_CASE("K_t^lambda") {
    const double alpha = 0.75;
    CHECK_THROWS_AS(kernel_K_lambda(1.0, 1.0, 0.0, alpha), InvalidParameter);
    for (double t : {0.1, 1.0, 4.0}) {
        CHECK(kernel_K_lambda(t, 1.5, 0.0, alpha) == doctest::Approx(std::pow(t, -2.0 / alpha)));
        double prev = INFINITY;
        for (double x : {0.0, 0.1, 1.0, 10.0, 1e3}) {
            const double k = kernel_K_lambda(t, 1.5, -x, alpha);
            CHECK(k < prev);
            prev = k;
        }
        for (double lambda : {1.2, 1.5, 1.8})
            CHECK(kernel_K_lambda_mass(t, lambda, alpha) == doctest::Approx(2.0 / (lambda - 1.0)).epsilon(1e-6));
    }
}

TEST_CASE("G* vertical") {
    const double alpha = 0.75;
    const GridSpec g(32.0, 1 << 11);
    CHECK(g_star_vertical(SampledFunction(g), alpha, 1.5).values.sup_norm() == 0.0);
    const auto f = SampledFunction::from(g, bump_fn(1.0, 1.0, 0.5));
    const auto a = g_star_vertical(f, alpha, 1.5).values;
    const auto b = g_star_vertical(3.0 * f, alpha, 1.5).values;
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(b[j]) == doctest::Approx(3.0 * std::abs(a[j])).epsilon(1e-10));
    CHECK_THROWS_AS(g_star_vertical(f, alpha, 1.0), InvalidParameter);
}

TEST_CASE("norm ratio report") {
    RatioOptions opt;
    opt.tq = TimeQuadrature(1e-3, 1e3, 128);
    const GridSpec g(32.0, 1 << 11);
    CHECK(norm_ratio_report(std::vector<NamedFunction>{}, g, opt).rows.empty());

    std::vector<NamedFunction> suite;
    for (int i = 0; i < 10; ++i)
        suite.push_back({"bump" + std::to_string(i), bump_fn(-2.0 + 0.4 * i, 0.6 + 0.15 * i, 0.3 * i)});
    const auto report = norm_ratio_report(suite, g, opt);
    CHECK(report.rows.size() == 20);
    for (const auto& row : report.rows) {
        INFO(row.name << " " << row.refinement[0] << " " << row.refinement[1]);
        CHECK(row.pass);
    }

    // Scale and grid-aligned translation invariance of the ratios.
    const auto f = SampledFunction::from(g, suite[3].fn);
    std::vector<Complex> shifted(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) shifted[(j + 40) % g.size()] = f[j];
    const auto base = norm_ratio_report(std::vector<SampledFunction>{f}, opt);
    const auto scaled = norm_ratio_report(std::vector<SampledFunction>{2.0 * f}, opt);
    const auto moved = norm_ratio_report(std::vector<SampledFunction>{SampledFunction(g, shifted)}, opt);
    for (std::size_t r = 0; r < base.rows.size(); ++r)
        CHECK(scaled.rows[r].value == doctest::Approx(base.rows[r].value).epsilon(1e-12));
    CHECK(moved.rows[0].value == doctest::Approx(base.rows[0].value).epsilon(1e-10));
}
