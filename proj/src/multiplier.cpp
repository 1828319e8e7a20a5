#include "fracmul/multiplier.hpp"

#include "fracmul/error.hpp"
#include "fracmul/parallel.hpp"
#include "fracmul/quadrature.hpp"
#include "fracmul/semigroup.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace fracmul {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::plus: return "plus";
        case Variant::minus: return "minus";
        case Variant::generator: return "generator";
    }
    return "plus";
}

Variant parse_variant(std::string_view name) {
    for (auto v : {Variant::plus, Variant::minus, Variant::generator})
        if (to_string(v) == name) return v;
    throw InvalidParameter("unknown variant '" + std::string(name) + "' (plus, minus, generator)");
}

double ConditionReport::headline() const {
    if (condition == "plus") return c_frac_plus;
    if (condition == "minus") return c_frac_minus;
    if (condition == "generator") return c_gen;
    return c_classical;
}

Json to_json(const ConditionReport& r) {
    Json j;
    j["multiplier"] = r.multiplier;
    j["condition"] = r.condition;
    j["alpha"] = r.alpha;
    j["m_inf"] = r.m_inf;
    j["c_classical"] = r.c_classical;
    j["c_frac_plus"] = r.c_frac_plus;
    j["c_frac_minus"] = r.c_frac_minus;
    j["c_gen"] = r.c_gen;
    j["delta"] = r.delta;
    j["argmax"] = r.argmax;
    j["grids_used"] = r.grids_used;
    j["history"] = r.history;
    j["refinement_tol"] = r.refinement_tol;
    j["generator_consistency"] = r.generator_consistency;
    j["finite"] = r.finite;
    j["stable"] = r.stable;
    j["verdict"] = r.verdict();
    j["warnings"] = r.warnings;
    return j;
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
}

void check_delta(double delta, const GridSpec& grid) {
    if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
    if (!(delta < grid.half_width())) throw InvalidParameter("delta must be smaller than the grid half width");
}

bool stable_pair(double a, double b, double tol) {
    // Both vanishing (m constant) counts as stable.
    return std::max(std::abs(a), std::abs(b)) < 1e-14 || relative_change(a, b) < tol;
}

std::vector<double> evaluation_points(const GridSpec& grid, double delta) {
    std::vector<double> xs;
    for (double x : grid.points())
        if (std::abs(x) >= delta) xs.push_back(x);
    return xs;
}

}  // namespace

ConditionReport check_classical(const MultiplierSpec& m, const GridSpec& grid, double delta, double refinement_tol) {
    check_delta(delta, grid);
    ConditionReport r;
    r.multiplier = m.name();
    r.m_inf = m.sup_norm();
    r.delta = delta;
    r.refinement_tol = refinement_tol;
    if (!m.is_real()) r.warnings.push_back("complex multiplier: the conditions are stated for real m");

    auto level = [&](const GridSpec& g) {
        const double h = g.spacing();
        double sup = 0.0;
        double where = 0.0;
        for (double x : evaluation_points(g, delta)) {
            std::optional<Complex> d;
            if (m.has_closed_form_derivative()) d = m.derivative(x);
            if (!d) d = (m(x + h) - m(x - h)) / (2.0 * h);
            const double v = std::abs(x) * std::abs(*d);
            if (!std::isfinite(v)) {
                r.finite = false;
                continue;
            }
            if (v > sup) {
                sup = v;
                where = x;
            }
        }
        r.grids_used.push_back(g.size());
        r.history.push_back(sup);
        return std::pair{sup, where};
    };
    const auto coarse = level(grid);
    const auto fine = level(grid.refined());
    r.c_classical = fine.first;
    r.argmax = fine.second;
    r.stable = stable_pair(coarse.first, fine.first, refinement_tol);
    return r;
}

namespace {

struct FracLevel {
    double plus = 0.0, minus = 0.0, gen = 0.0;
    double where = 0.0;
    double consistency = 0.0;
    bool finite = true;
};

PointwiseOptions quadrature_for(const MultiplierSpec& m, PointwiseOptions q) {
    if (m.source() == Builtin::cos_log) q.singular_points = {0.0};
    if (m.has_closed_form_derivative()) q.derivative = [m](double x) { return m.derivative(x); };
    q.limits = m.limits();
    return q;
}

FracLevel fractional_level(const MultiplierSpec& m, double alpha, Variant variant, const GridSpec& grid, double delta,
                           const PointwiseOptions& q, std::size_t workers) {
    const auto xs = evaluation_points(grid, delta);
    const RealLineFunction f = m.as_symbol();
    const bool all = variant == Variant::generator;
    constexpr std::size_t block = 128;
    const std::size_t blocks = (xs.size() + block - 1) / block;

    struct Partial {
        std::vector<std::array<double, 4>> values;  // plus, minus, gen, consistency
    };
    auto partials = parallel_map(blocks, workers, [&](std::size_t b) {
        Partial p;
        for (std::size_t i = b * block; i < std::min(xs.size(), (b + 1) * block); ++i) {
            const double x = xs[i];
            const double w = std::pow(std::abs(x), alpha);
            std::array<double, 4> v{NAN, NAN, NAN, NAN};
            Complex dp{}, dm{};
            if (all || variant == Variant::plus) {
                dp = d_alpha_at(f, x, alpha, Sign::plus, q).value;
                v[0] = w * std::abs(dp);
            }
            if (all || variant == Variant::minus) {
                dm = d_alpha_at(f, x, alpha, Sign::minus, q).value;
                v[1] = w * std::abs(dm);
            }
            if (all) {
                const Complex lg = generator_at(f, x, alpha, q).value;
                v[2] = w * std::abs(lg);
                v[3] = w * std::abs(lg + dp + dm);
            }
            p.values.push_back(v);
        }
        return p;
    });

    FracLevel out;
    double best = -1.0;
    const int head = variant == Variant::plus ? 0 : variant == Variant::minus ? 1 : 2;
    std::size_t i = 0;
    for (const auto& p : partials) {
        for (const auto& v : p.values) {
            for (int k : {0, 1, 2, 3})
                if (!std::isnan(v[k]) && !std::isfinite(v[k])) out.finite = false;
            auto upd = [](double& acc, double val) {
                if (std::isfinite(val)) acc = std::max(acc, val);
            };
            upd(out.plus, v[0]);
            upd(out.minus, v[1]);
            upd(out.gen, v[2]);
            upd(out.consistency, v[3]);
            if (std::isfinite(v[head]) && v[head] > best) {
                best = v[head];
                out.where = xs[i];
            }
            ++i;
        }
    }
    return out;
}

}  // namespace

ConditionReport check_fractional(const MultiplierSpec& m, double alpha, Variant variant, const GridSpec& grid,
                                 double delta, const FractionalOptions& opt) {
    check_alpha(alpha);
    check_delta(delta, grid);
    ConditionReport r;
    r.multiplier = m.name();
    r.condition = std::string(to_string(variant));
    r.alpha = alpha;
    r.m_inf = m.sup_norm();
    r.delta = delta;
    r.refinement_tol = opt.refinement_tol;
    if (!(alpha > 0.5)) r.warnings.push_back("alpha <= 1/2: outside the range where the fractional condition implies L^p bounds");
    if (!m.is_real()) r.warnings.push_back("complex multiplier: the conditions are stated for real m");

    PointwiseOptions q = quadrature_for(m, opt.quadrature);
    const FracLevel coarse = fractional_level(m, alpha, variant, grid, delta, q, opt.workers);
    q.near_cut *= 0.5;
    const FracLevel fine = fractional_level(m, alpha, variant, grid.refined(), delta, q, opt.workers);

    r.grids_used = {grid.size(), 2 * grid.size()};
    const bool all = variant == Variant::generator;
    if (all || variant == Variant::plus) r.c_frac_plus = fine.plus;
    if (all || variant == Variant::minus) r.c_frac_minus = fine.minus;
    if (all) {
        r.c_gen = fine.gen;
        r.generator_consistency = std::max(coarse.consistency, fine.consistency);
    }
    auto pick = [&](const FracLevel& l) {
        return variant == Variant::plus ? l.plus : variant == Variant::minus ? l.minus : l.gen;
    };
    r.history = {pick(coarse), pick(fine)};
    r.argmax = fine.where;
    r.finite = coarse.finite && fine.finite && std::isfinite(r.history[1]);
    r.stable = stable_pair(r.history[0], r.history[1], opt.refinement_tol);
    return r;
}

VerificationReport classical_implies_fractional(const MultiplierSpec& m, double alpha, const GridSpec& grid,
                                                double delta, const InclusionOptions& opt) {
    VerificationReport report;
    report.experiment = "classical-implies-fractional";
    report.parameters = {{"multiplier", m.name()}, {"alpha", alpha},    {"half_width", grid.half_width()},
                         {"n", grid.size()},       {"delta", delta},    {"slack", opt.slack}};

    const auto classical = check_classical(m, grid, delta);
    const auto frac = check_fractional(m, alpha, Variant::plus, grid, delta, opt.fractional);

    ReportRow c;
    c.name = "c_classical";
    c.value = classical.c_classical;
    c.refinement = classical.history;
    c.pass = classical.verdict();
    report.add(c);

    ReportRow f;
    f.name = "c_frac_plus";
    f.value = frac.c_frac_plus;
    f.refinement = frac.history;
    f.tolerance = opt.fractional.refinement_tol;
    f.pass = frac.verdict();
    f.params = {{"argmax", frac.argmax}};
    report.add(f);

    ReportRow ratio;
    ratio.name = "inclusion_ratio";
    ratio.value = frac.c_frac_plus / (1.0 + classical.c_classical + classical.m_inf);
    ratio.reference = opt.slack;
    ratio.pass = std::isfinite(ratio.value) && ratio.value <= opt.slack;
    ratio.params = {{"m_inf", classical.m_inf}};
    report.add(ratio);

    for (const auto& w : frac.warnings) report.notes.push_back(w);
    return report;
}

// ---------------------------------------------------------------------------
// J-norm.

namespace {

double k_prime(double x, double alpha) {
    // x > 0.
    const double u = std::pow(x, alpha / 2.0);
    return 0.5 * alpha * std::pow(x, alpha / 2.0 - 1.0) * std::exp(-0.5 * u) * (1.0 - 0.5 * u);
}

// The other positive z with K(z) = K(x) (x itself at the peak).
double level_partner(double x, double alpha) {
    const double u0 = std::pow(x, alpha / 2.0);
    if (u0 == 2.0) return x;
    const double target = std::log(u0) - 0.5 * u0;
    auto g = [&](double u) { return std::log(u) - 0.5 * u - target; };
    double lo, hi;
    if (u0 < 2.0) {
        lo = 2.0;
        hi = 4.0;
        while (g(hi) > 0.0) hi *= 2.0;
    } else {
        hi = 2.0;
        lo = 1.0;
        while (g(lo) > 0.0) lo *= 0.5;
    }
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    return std::pow(0.5 * (a + b), 2.0 / alpha);
}

double j_far_cut(double alpha, double x) {
    // K(y) < 1e-30 beyond u = 150.
    return std::max(1e12, std::pow(150.0, 2.0 / alpha)) + 2.0 * x;
}

}  // namespace

double j_function(double x, double alpha) {
    check_alpha(alpha);
    x = std::abs(x);
    if (x == 0.0) return INFINITY;
    const double kx = k_func(x, alpha);
    const double partner = level_partner(x, alpha);
    auto phi = [&](double y) {
        return std::abs(k_func(x - y, alpha) - kx) + std::abs(k_func(x + y, alpha) - kx);
    };
    std::vector<double> breaks{x, 2.0 * x, x + partner};
    if (std::abs(partner - x) > 1e-12 * x) breaks.push_back(std::abs(partner - x));
    const double far = j_far_cut(alpha, x);
    const double slope = 2.0 * std::abs(k_prime(x, alpha));
    const double near = quad::halfline_singular(phi, slope, alpha, 1e-2 * x, far, breaks);
    return near + 2.0 * kx * std::pow(far, -alpha) / alpha;
}

JNormResult j_norm(double alpha, const JNormOptions& opt) {
    check_alpha(alpha);
    if (!(opt.x_min > 0.0) || opt.panels_per_decade == 0 || opt.levels < 2)
        throw InvalidParameter("j_norm needs x_min > 0, panels_per_decade >= 1 and levels >= 2");
    const double x_max = opt.x_max > 0.0 ? opt.x_max : 10.0 * std::pow(60.0, 2.0 / alpha);
    if (!(x_max > opt.x_min)) throw InvalidParameter("j_norm needs x_max > x_min");
    const double decades = std::log10(x_max / opt.x_min);
    const auto& rule = quad::gauss_legendre(16);

    JNormResult out{0.0, {}, false};
    for (std::size_t level = 0; level < opt.levels; ++level) {
        const std::size_t panels =
            static_cast<std::size_t>(std::ceil(decades * static_cast<double>(opt.panels_per_decade << level)));
        const double step = std::log(x_max / opt.x_min) / static_cast<double>(panels);
        // int J^2 dx = int J(e^v)^2 e^v dv over panels in v = log x.
        auto sums = parallel_map(panels, opt.workers, [&](std::size_t i) {
            const double a = std::log(opt.x_min) + step * static_cast<double>(i);
            return quad::panel(
                [&](double v) {
                    const double x = std::exp(v);
                    const double j = j_function(x, alpha);
                    return j * j * x;
                },
                a, a + step, rule);
        });
        double total = 0.0;
        for (double s : sums) total += s;
        const double j_lo = j_function(opt.x_min, alpha);
        const double j_hi = j_function(x_max, alpha);
        total += j_lo * j_lo * opt.x_min / (1.0 - alpha);   // J^2 ~ x^(-a) near 0
        total += j_hi * j_hi * x_max / (1.0 + 2.0 * alpha);  // J^2 ~ x^(-2-2a) far out
        out.history.push_back(std::sqrt(2.0 * total));         // J is even
    }
    out.value = out.history.back();
    const auto n = out.history.size();
    out.cauchy = std::isfinite(out.value) && relative_change(out.history[n - 2], out.history[n - 1]) < opt.cauchy_tol;
    if (!out.cauchy && alpha > 0.5) {
        std::ostringstream msg;
        msg << "j_norm did not settle for alpha = " << alpha << " (last two levels " << out.history[n - 2] << ", "
            << out.history[n - 1] << ")";
        throw ConvergenceError(msg.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weighted kernel norm.

std::size_t weighted_norm_grid_size(double alpha, const WeightedNormOptions& opt) {
    check_alpha(alpha);
    if (opt.n != 0) return opt.n;
    const double k_max = 2.0 / std::numbers::e;
    std::size_t n = 256;
    while (n < opt.max_n) {
        const double nyquist = std::numbers::pi * static_cast<double>(n) / (2.0 * opt.half_width);
        if (k_func(nyquist, alpha) <= opt.resolution * k_max) break;
        n *= 2;
    }
    return n;
}

double weighted_kernel_norm(const MultiplierSpec& m, double alpha, double s, const WeightedNormOptions& opt) {
    check_alpha(alpha);
    if (!(s > 0.0)) throw InvalidParameter("weighted_kernel_norm needs s > 0");
    if (!(opt.half_width > 0.0)) throw InvalidParameter("weighted_kernel_norm needs half_width > 0");
    const GridSpec grid(opt.half_width, weighted_norm_grid_size(alpha, opt));
    const double k_max = 2.0 / std::numbers::e;
    const double residual = k_func(grid.nyquist(), alpha) / k_max;
    if (residual > opt.resolution) {
        std::ostringstream msg;
        msg << "weighted kernel norm unresolved: K(nyquist)/max K = " << residual << " > " << opt.resolution
            << " with n = " << grid.size();
        throw ResolutionError(msg.str());
    }
    const double sigma = std::pow(s, 2.0 / alpha);
    const auto kernel = kernel_from_symbol([&](double eta) { return k_func(eta, alpha) * m(eta / sigma); }, grid);
    double sum = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double w = std::pow(1.0 + std::abs(grid.point(j)), 2.0 * alpha);
        sum += w * std::norm(kernel[j]);
    }
    return 0.5 * std::pow(s, 1.0 - 1.0 / alpha) * std::sqrt(sum * grid.spacing());
}

std::vector<double> dyadic_s_values() {
    std::vector<double> s;
    for (int k = -8; k <= 8; ++k) s.push_back(std::exp2(0.5 * k));
    return s;
}

VerificationReport thm22_ratio_scan(const MultiplierSpec& m, double alpha, const std::vector<double>& s_values,
                                    const std::vector<std::pair<Variant, double>>& constants,
                                    const ScanOptions& opt) {
    check_alpha(alpha);
    if (s_values.empty()) throw InvalidParameter("thm22_ratio_scan needs at least one s");
    for (const auto& [v, c] : constants)
        if (!(c > 0.0) || !std::isfinite(c))
            throw InvalidParameter("thm22_ratio_scan needs a positive finite C1 for variant " +
                                   std::string(to_string(v)));

    WeightedNormOptions coarse = opt.grid;
    coarse.n = weighted_norm_grid_size(alpha, opt.grid);
    WeightedNormOptions fine = coarse;
    fine.n = 2 * coarse.n;

    VerificationReport report;
    report.experiment = "thm22-scan";
    report.parameters = {{"multiplier", m.name()},       {"alpha", alpha},
                         {"half_width", opt.grid.half_width}, {"n", coarse.n},
                         {"ratio_bound", opt.ratio_bound},    {"refinement_tol", opt.refinement_tol}};

    const std::size_t count = s_values.size();
    const auto norms = parallel_map(2 * count, opt.workers, [&](std::size_t i) {
        return weighted_kernel_norm(m, alpha, s_values[i % count], i < count ? coarse : fine);
    });

    for (const auto& [variant, c1] : constants) {
        const std::string tag(to_string(variant));
        std::vector<double> profile;
        for (std::size_t i = 0; i < count; ++i) {
            const double s = s_values[i];
            const double scale = c1 * std::pow(s, 1.0 - 1.0 / alpha);
            const double r0 = norms[i] / scale;
            const double r1 = norms[count + i] / scale;
            ReportRow row;
            row.name = tag + ":R(s=" + format_double(s) + ")";
            row.value = r1;
            row.refinement = {r0, r1};
            row.tolerance = opt.refinement_tol;
            row.pass = std::isfinite(r1) && stable_pair(r0, r1, opt.refinement_tol);
            row.params = {{"variant", tag}, {"s", s}, {"c1", c1}};
            report.add(std::move(row));
            profile.push_back(r1);
        }
        auto sorted = profile;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                                : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        ReportRow summary;
        summary.name = tag + ":sup_over_median";
        summary.value = sorted.back() / median;
        summary.reference = opt.ratio_bound;
        summary.pass = std::isfinite(summary.value) && summary.value <= opt.ratio_bound;
        summary.params = {{"variant", tag}, {"sup", sorted.back()}, {"median", median}, {"c1", c1}};
        report.add(std::move(summary));
    }
    return report;
}

// ---------------------------------------------------------------------------
// L^p stability.

std::vector<NamedFunction> lp_test_suite(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * uniform_open(engine); };
    std::vector<NamedFunction> suite;
    for (std::size_t i = 0; i < count; ++i) {
        const double center = uniform(-4.0, 4.0);
        const double width = uniform(0.5, 3.0);
        const double omega = uniform(0.0, 3.0);
        const std::string index = (i < 10 ? "0" : "") + std::to_string(i);
        if (i % 2 == 0) {
            const std::string name = "gauss-" + index;
            suite.push_back({name, [=](double x) {
                                 const double u = (x - center) / width;
                                 return Complex(std::exp(-u * u) * std::cos(omega * (x - center)));
                             }});
        } else {
            const int power = 3 + static_cast<int>(std::floor(uniform(0.0, 4.0)));
            const std::string name = "bump" + std::to_string(power) + "-" + index;
            suite.push_back({name, [=](double x) {
                                 const double u = (x - center) / width;
                                 if (std::abs(u) >= 1.0) return Complex{};
                                 return Complex(std::pow(1.0 - u * u, power) * std::cos(omega * (x - center)));
                             }});
        }
    }
    return suite;
}

VerificationReport lp_stability_scan(const MultiplierSpec& m, double p, const std::vector<NamedFunction>& suite,
                                     const GridSpec& grid, const LpOptions& opt) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidParameter("lp_stability_scan needs 1 < p < inf");
    if (suite.empty()) throw InvalidParameter("lp_stability_scan needs a nonempty suite");
    VerificationReport report;
    report.experiment = "lp-scan";
    report.parameters = {{"multiplier", m.name()}, {"p", p},
                         {"half_width", grid.half_width()}, {"n", grid.size()},
                         {"c1", opt.c1}, {"bound_multiple", opt.bound_multiple},
                         {"refinement_tol", opt.refinement_tol}};

    const std::size_t count = suite.size();
    const auto ratios = parallel_map(2 * count, opt.workers, [&](std::size_t i) {
        const GridSpec g = i < count ? grid : grid.refined();
        const auto f = SampledFunction::from(g, suite[i % count].fn);
        const double norm = lp_norm(f, p);
        if (norm == 0.0) throw InvalidParameter("lp_stability_scan: '" + suite[i % count].name + "' vanishes on the grid");
        return lp_norm(apply_spectral_multiplier(f, m), p) / norm;
    });

    double max_fine = 0.0, max_any = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        ReportRow row;
        row.name = suite[i].name;
        row.value = ratios[count + i];
        row.refinement = {ratios[i], ratios[count + i]};
        row.tolerance = opt.refinement_tol;
        row.pass = std::isfinite(row.value) && stable_pair(ratios[i], ratios[count + i], opt.refinement_tol);
        row.params = {{"p", p}};
        report.add(std::move(row));
        max_fine = std::max(max_fine, ratios[count + i]);
        max_any = std::max({max_any, ratios[i], ratios[count + i]});
    }

    const double m_inf = m.sup_norm();
    ReportRow bound;
    bound.name = "max_ratio";
    bound.value = max_fine;
    bound.reference = opt.bound_multiple * std::max(opt.c1, m_inf);
    bound.pass = std::isfinite(max_fine) && max_fine <= *bound.reference;
    report.add(std::move(bound));
    if (p == 2.0) {
        ReportRow plancherel;
        plancherel.name = "plancherel";
        plancherel.value = max_any;
        plancherel.reference = m_inf;
        plancherel.tolerance = 1e-8;
        plancherel.pass = max_any <= m_inf + 1e-8;
        report.add(std::move(plancherel));
    }
    return report;
}

}  // namespace fracmul
