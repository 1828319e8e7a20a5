#include "fracmul/experiments.hpp"

#include "fracmul/error.hpp"
#include "fracmul/fracderiv.hpp"
#include "fracmul/lpaley.hpp"
#include "fracmul/multiplier.hpp"
#include "fracmul/parallel.hpp"
#include "fracmul/semigroup.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>

namespace fracmul {

// ---------------------------------------------------------------------------
// Tables.

std::string Table::to_csv() const {
    auto cell = [](const Json& v) -> std::string {
        switch (v.type()) {
            case Json::value_t::number_float: {
                const double d = v.get<double>();
                return std::isfinite(d) ? format_double(d) : (std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf"));
            }
            case Json::value_t::string: {
                const auto s = v.get<std::string>();
                if (s.find_first_of(",\"\n") == std::string::npos) return s;
                std::string q = "\"";
                for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
                return q + "\"";
            }
            case Json::value_t::null: return "";
            default: return v.dump();
        }
    };
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell(row[i]);
        out += "\n";
    }
    return out;
}

bool ExperimentOutput::verdict() const {
    return std::all_of(results.begin(), results.end(), [](const VerificationReport& r) { return r.verdict(); });
}

namespace {

std::string num(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Typed access with the conversions every experiment needs.
struct Settings {
    const Config& cfg;
    const RunContext& run;

    double tol(const std::string& key) const { return cfg.get_double("tolerance." + key) * run.tolerance_scale; }

    std::vector<double> alphas(const std::string& key = "alpha") const {
        auto a = cfg.get_doubles(key);
        if (a.empty()) throw ConfigError("key '" + key + "' is empty");
        for (double v : a)
            if (!(v > 0.0 && v < 1.0)) throw ConfigError("key '" + key + "': alpha must lie in (0, 1), got " + num(v));
        return a;
    }

    GridSpec grid(const std::string& section) const {
        const double L = cfg.get_double(section + ".half_width");
        const auto n = cfg.get_uint(section + ".n");
        try {
            return GridSpec(L, n);
        } catch (const InvalidParameter& e) {
            throw ConfigError("section [" + section + "]: " + e.what());
        }
    }

    std::size_t positive(const std::string& key) const {
        const auto v = cfg.get_uint(key);
        if (v == 0) throw ConfigError("key '" + key + "' must be positive");
        return v;
    }

    MultiplierSpec multiplier(const std::string& name) const {
        Builtin id;
        try {
            id = parse_builtin(name);
        } catch (const InvalidParameter& e) {
            throw ConfigError(e.what());
        }
        MultiplierSpec m = id == Builtin::user_sampled
                               ? MultiplierSpec::sampled(read_multiplier_csv(cfg.get_string("multiplier.table")))
                               : MultiplierSpec::builtin(id);
        const double scale = cfg.get_double("multiplier.scale", 1.0);
        return scale == 1.0 ? m : m.scaled(scale);
    }

    std::vector<MultiplierSpec> multipliers(const std::string& key) const {
        std::vector<MultiplierSpec> out;
        for (const auto& name : cfg.get_strings(key)) out.push_back(multiplier(name));
        return out;
    }

    std::vector<Variant> variants(const std::string& key) const {
        std::vector<Variant> out;
        for (const auto& name : cfg.get_strings(key)) {
            try {
                out.push_back(parse_variant(name));
            } catch (const InvalidParameter& e) {
                throw ConfigError(e.what());
            }
        }
        return out;
    }
};

Table rows_table(const VerificationReport& r, const std::string& name) {
    Table t{name, {"name", "value", "reference", "tolerance", "pass", "refinement", "params"}, {}};
    for (const auto& row : r.rows) {
        std::string refinement;
        for (std::size_t i = 0; i < row.refinement.size(); ++i)
            refinement += (i ? ";" : "") + format_double(row.refinement[i]);
        t.rows.push_back({row.name, row.value, row.reference ? Json(*row.reference) : Json(),
                          row.tolerance ? Json(*row.tolerance) : Json(), row.pass, refinement,
                          row.params.empty() ? std::string() : dump_json(row.params, -1)});
    }
    return t;
}

void finish_tables(ExperimentOutput& out) {
    for (std::size_t i = 0; i < out.results.size(); ++i) {
        std::string stem = std::to_string(i);
        stem.insert(0, 3 - std::min<std::size_t>(3, stem.size()), '0');
        out.tables.push_back(rows_table(out.results[i], stem + "-" + out.results[i].experiment));
    }
}

ReportRow make_row(std::string name, double value, bool pass, Json params = Json::object()) {
    ReportRow r;
    r.name = std::move(name);
    r.value = value;
    r.pass = pass;
    r.params = std::move(params);
    return r;
}

ReportRow diagnostic_row(std::string name, double value, Json params = Json::object()) {
    params["diagnostic"] = true;
    return make_row(std::move(name), value, true, std::move(params));
}

// ---------------------------------------------------------------------------

ExperimentOutput verify_symbols(const Settings& s) {
    const auto alphas = s.alphas();
    const GridSpec grid = s.grid("grid");
    const double far = s.cfg.get_double("quadrature.far_cut");
    const double cells = s.cfg.get_double("quadrature.near_cut_cells");
    const auto functions = s.cfg.get_strings("functions");
    const double rel = s.tol("rel_l2");
    const double band = s.tol("halving_band");
    std::map<std::string, std::function<double(double)>> catalog{
        {"gaussian", [](double x) { return std::exp(-x * x / 2.0); }},
        {"bump", [](double x) { return std::abs(x) < 3.0 ? std::pow(1.0 - x * x / 9.0, 4) : 0.0; }}};
    for (const auto& f : functions)
        if (!catalog.count(f)) throw ConfigError("key 'functions': unknown function '" + f + "' (gaussian, bump)");

    ExperimentOutput out;
    if (s.run.dry_run) {
        for (const auto& f : functions)
            for (double a : alphas)
                out.plan.push_back("zero-mode D_a of " + f + " at alpha " + num(a) + " on n = " +
                                   std::to_string(grid.size() / 2) + ", " + std::to_string(grid.size()) + ", " +
                                   std::to_string(2 * grid.size()) + " with Y = " + num(far / 2) + ", " + num(far) +
                                   ", " + num(2 * far));
        return out;
    }

    VerificationReport report;
    report.experiment = "verify-symbols";
    report.parameters = {{"half_width", grid.half_width()}, {"n", grid.size()}, {"far_cut", far},
                         {"near_cut_cells", cells},          {"rel_l2", rel},    {"halving_band", band}};
    Table plot{"symbol-errors", {"function", "alpha", "n", "far_cut", "rel_l2_error"}, {}};

    struct Task {
        std::string f;
        double alpha;
        int level;  // 0: (n/2, Y/2), 1: (n, Y), 2: (2n, 2Y)
    };
    std::vector<Task> tasks;
    for (const auto& f : functions)
        for (double a : alphas)
            for (int level = 0; level < 3; ++level) tasks.push_back({f, a, level});
    auto errors = parallel_map(tasks.size(), s.run.workers, [&](std::size_t i) {
        const auto& t = tasks[i];
        const double scale = std::ldexp(1.0, t.level - 1);
        const GridSpec g(grid.half_width(), static_cast<std::size_t>(grid.size() * scale));
        const auto f = SampledFunction::from(g, [&](double x) { return Complex(catalog.at(t.f)(x)); });
        const FracParams p(t.alpha, cells * g.spacing(), far * scale, Boundary::zero);
        const auto d = d_alpha(f, p).values;
        const auto ref = spectral_d_alpha(f, t.alpha, Sign::plus);
        return lp_norm(d - ref, 2.0) / lp_norm(f, 2.0);
    });

    for (std::size_t i = 0; i < tasks.size(); i += 3) {
        const auto& t = tasks[i];
        const std::string tag = t.f + ":a=" + num(t.alpha);
        const double e0 = errors[i], e1 = errors[i + 1], e2 = errors[i + 2];
        ReportRow mag = make_row(tag + ":rel_l2", e1, e1 <= rel, {{"alpha", t.alpha}, {"function", t.f}});
        mag.reference = rel;
        mag.refinement = {e0, e1};
        report.add(mag);
        const double ratio = e1 / e0;
        ReportRow halving = make_row(tag + ":halving", ratio, std::abs(ratio - 0.5) <= 0.5 * band,
                                     {{"alpha", t.alpha}, {"function", t.f}});
        halving.reference = 0.5;
        halving.tolerance = 0.5 * band;
        report.add(halving);
        report.add(diagnostic_row(tag + ":next_halving", e2 / e1, {{"alpha", t.alpha}, {"function", t.f}}));
        for (int level = 0; level < 3; ++level) {
            const double scale = std::ldexp(1.0, level - 1);
            plot.rows.push_back({t.f, t.alpha, static_cast<std::uint64_t>(grid.size() * scale), far * scale,
                                 errors[i + static_cast<std::size_t>(level)]});
        }
    }
    report.notes.push_back("halving is judged on the pair ending at the configured (n, Y); next_halving is informative");
    out.results.push_back(std::move(report));
    out.plotdata.push_back(std::move(plot));
    return out;
}

ExperimentOutput verify_product_rule(const Settings& s) {
    const auto alphas = s.alphas();
    const GridSpec grid = s.grid("grid");
    const std::size_t pairs = s.positive("pairs");
    const auto seed = s.cfg.get_uint("suite_seed");
    const double tol = s.tol("residual");
    ExperimentOutput out;
    if (s.run.dry_run) {
        out.plan.push_back(std::to_string(pairs) + " function pairs x " + std::to_string(alphas.size()) +
                           " alphas x {plus, minus}, n = " + std::to_string(grid.size()));
        return out;
    }
    const auto suite = lp_test_suite(2 * pairs, seed);
    VerificationReport report;
    report.experiment = "verify-product-rule";
    report.parameters = {{"half_width", grid.half_width()}, {"n", grid.size()}, {"pairs", pairs},
                         {"suite_seed", seed},               {"residual", tol}};
    struct Task {
        std::size_t pair;
        double alpha;
        Sign sign;
    };
    std::vector<Task> tasks;
    for (std::size_t k = 0; k < pairs; ++k)
        for (double a : alphas)
            for (Sign sg : {Sign::plus, Sign::minus}) tasks.push_back({k, a, sg});
    auto residuals = parallel_map(tasks.size(), s.run.workers, [&](std::size_t i) {
        const auto& t = tasks[i];
        const auto f = SampledFunction::from(grid, suite[2 * t.pair].fn);
        const auto g = SampledFunction::from(grid, suite[2 * t.pair + 1].fn);
        const double r = product_rule_residual(f, g, FracParams::defaults(t.alpha, grid), t.sign);
        return r / (1.0 + f.sup_norm() * g.sup_norm());
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        const std::string sign = t.sign == Sign::plus ? "plus" : "minus";
        ReportRow row = make_row(suite[2 * t.pair].name + "*" + suite[2 * t.pair + 1].name + ":a=" + num(t.alpha) +
                                     ":" + sign,
                                 residuals[i], residuals[i] <= tol, {{"alpha", t.alpha}, {"sign", sign}});
        row.reference = tol;
        report.add(row);
    }
    out.results.push_back(std::move(report));
    return out;
}

ExperimentOutput verify_semigroup(const Settings& s) {
    const auto alphas = s.alphas();
    const auto times = s.cfg.get_doubles("t");
    for (double t : times)
        if (!(t > 0.0)) throw ConfigError("key 't': times must be positive");
    const GridSpec grid = s.grid("grid");
    const auto max_n = s.cfg.get_uint("grid.max_n");
    const double law = s.tol("law"), mass = s.tol("mass"), negativity = s.tol("negativity");

    auto resolving_n = [&](double t, double a) -> std::size_t {
        for (std::size_t n = grid.size(); n <= max_n; n *= 2)
            if (nyquist_residual(t, a / 2.0, GridSpec(grid.half_width(), n)) <= kResolutionThreshold) return n;
        return 0;
    };

    ExperimentOutput out;
    if (s.run.dry_run) {
        for (double a : alphas)
            for (double t : times) {
                const auto n = resolving_n(t, a);
                out.plan.push_back("q_t at t = " + num(t) + ", alpha = " + num(a) + ": " +
                                   (n ? "n = " + std::to_string(n) : std::string("unresolved up to max_n")));
            }
        return out;
    }

    VerificationReport report;
    report.experiment = "verify-semigroup";
    report.parameters = {{"half_width", grid.half_width()}, {"n", grid.size()}, {"max_n", max_n},
                         {"law", law}, {"mass", mass}, {"negativity", negativity}};

    const auto f = SampledFunction::from(grid, [](double x) { return Complex(std::exp(-x * x / 2.0)); });
    for (double a : alphas)
        for (std::size_t i = 0; i < times.size(); ++i)
            for (std::size_t j = i; j < times.size(); ++j) {
                const auto lhs = harmonic_extension(harmonic_extension(f, times[j], a), times[i], a);
                const auto rhs = harmonic_extension(f, times[i] + times[j], a);
                const double err = (lhs - rhs).sup_norm() / f.sup_norm();
                ReportRow row = make_row("law:a=" + num(a) + ":t=" + num(times[i]) + "+" + num(times[j]), err,
                                         err <= law, {{"alpha", a}, {"t", times[i]}, {"s", times[j]}});
                row.reference = law;
                report.add(row);
            }

    struct Task {
        double alpha, t;
        std::size_t n;
    };
    std::vector<Task> tasks;
    for (double a : alphas)
        for (double t : times) tasks.push_back({a, t, resolving_n(t, a)});
    // Large kernels: keep memory bounded by running them one at a time.
    for (const auto& task : tasks) {
        const std::string tag = "q:a=" + num(task.alpha) + ":t=" + num(task.t);
        Json params{{"alpha", task.alpha}, {"t", task.t}};
        if (task.n == 0) {
            params["skipped"] = "unresolved up to max_n";
            report.add(diagnostic_row(tag + ":unresolved", nyquist_residual(task.t, task.alpha / 2.0,
                                                                            GridSpec(grid.half_width(), max_n)),
                                      params));
            report.notes.push_back(tag + " is not resolved at n <= " + std::to_string(max_n) +
                                   "; excluded from the kernel checks");
            continue;
        }
        params["n"] = task.n;
        const auto q = q_kernel_spectral(task.t, task.alpha, GridSpec(grid.half_width(), task.n));
        const double m = integrate(q).real();
        double lowest = INFINITY;
        for (auto v : q.values()) lowest = std::min(lowest, v.real());
        ReportRow mrow = make_row(tag + ":mass", m, std::abs(m - 1.0) <= mass, params);
        mrow.reference = 1.0;
        mrow.tolerance = mass;
        report.add(mrow);
        ReportRow nrow = make_row(tag + ":min", lowest, lowest >= -negativity, params);
        nrow.tolerance = negativity;
        report.add(nrow);
    }
    out.results.push_back(std::move(report));
    return out;
}

ExperimentOutput verify_subordination(const Settings& s) {
    const auto alphas = s.alphas();
    const auto times = s.cfg.get_doubles("t");
    const GridSpec grid = s.grid("grid");
    const auto s_quad = s.cfg.get_uint("s_quad");
    const double tol = s.tol("sup");
    ExperimentOutput out;
    if (s.run.dry_run) {
        out.plan.push_back(std::to_string(alphas.size() * times.size()) + " (t, alpha) pairs, s_quad = " +
                           std::to_string(s_quad) + ", n = " + std::to_string(grid.size()));
        return out;
    }
    VerificationReport report;
    report.experiment = "verify-subordination";
    report.parameters = {{"half_width", grid.half_width()}, {"n", grid.size()}, {"s_quad", s_quad}, {"sup", tol}};
    std::vector<std::pair<double, double>> tasks;
    for (double t : times)
        for (double a : alphas) tasks.emplace_back(t, a);
    auto rows = parallel_map(tasks.size(), s.run.workers, [&](std::size_t i) {
        const auto [t, a] = tasks[i];
        const auto sub = q_kernel_subordinated(SubordinationParams(a, t, s_quad), grid);
        const auto spec = q_kernel_spectral(t, a, grid, Resolution::report);
        const double err = (sub.kernel - spec).sup_norm();
        ReportRow row = make_row("sub:a=" + num(a) + ":t=" + num(t), err, err <= tol,
                                 {{"alpha", a},
                                  {"t", t},
                                  {"s_min", sub.s_min},
                                  {"s_max", sub.s_max},
                                  {"excluded_mass", sub.excluded_mass},
                                  {"refinement_gap", sub.refinement_gap},
                                  {"nodes", sub.nodes}});
        row.reference = tol;
        return row;
    });
    for (auto& r : rows) report.add(std::move(r));
    out.results.push_back(std::move(report));
    return out;
}

ExperimentOutput verify_lemma21(const Settings& s) {
    const auto alphas = s.alphas();
    const auto diagnostic = s.cfg.has("diagnostic_alpha") ? s.alphas("diagnostic_alpha") : std::vector<double>{};
    JNormOptions opt;
    opt.x_min = s.cfg.get_double("jnorm.x_min");
    opt.panels_per_decade = s.positive("jnorm.panels_per_decade");
    opt.levels = s.positive("jnorm.levels");
    opt.cauchy_tol = s.tol("cauchy");
    opt.workers = s.run.workers;
    if (opt.levels < 2) throw ConfigError("key 'jnorm.levels' must be at least 2");
    ExperimentOutput out;
    if (s.run.dry_run) {
        out.plan.push_back("J-norm for " + std::to_string(alphas.size()) + " alphas (+" +
                           std::to_string(diagnostic.size()) + " diagnostic), " + std::to_string(opt.levels) +
                           " levels from " + std::to_string(opt.panels_per_decade) + " panels per decade");
        return out;
    }
    VerificationReport report;
    report.experiment = "verify-lemma21";
    report.parameters = {{"x_min", opt.x_min},
                         {"panels_per_decade", opt.panels_per_decade},
                         {"levels", opt.levels},
                         {"cauchy", opt.cauchy_tol}};
    Table plot{"j-norm", {"alpha", "value"}, {}};
    for (double a : alphas) {
        ReportRow row;
        row.name = "J:a=" + num(a);
        row.params = {{"alpha", a}};
        row.tolerance = opt.cauchy_tol;
        try {
            const auto r = j_norm(a, opt);
            row.value = r.value;
            row.refinement = r.history;
            row.pass = r.cauchy && std::isfinite(r.value);
        } catch (const ConvergenceError& e) {
            row.value = NAN;
            row.pass = false;
            report.notes.push_back(e.what());
        }
        plot.rows.push_back({a, row.value});
        report.add(std::move(row));
    }
    for (double a : diagnostic) {
        const auto r = j_norm(a, opt);
        ReportRow row = diagnostic_row("J:a=" + num(a), r.value, {{"alpha", a}, {"cauchy", r.cauchy}});
        row.refinement = r.history;
        plot.rows.push_back({a, r.value});
        report.add(std::move(row));
    }
    out.results.push_back(std::move(report));
    out.plotdata.push_back(std::move(plot));
    return out;
}

FractionalOptions fractional_options(const Settings& s) {
    FractionalOptions fo;
    fo.quadrature.near_cut = s.cfg.get_double("quadrature.near_cut");
    fo.quadrature.far_cut = s.cfg.get_double("quadrature.far_cut");
    fo.refinement_tol = s.tol("refinement_condition");
    fo.workers = s.run.workers;
    return fo;
}

ExperimentOutput thm22_scan(const Settings& s) {
    const auto alphas = s.alphas();
    const auto ms = s.multipliers("multipliers");
    const auto variants = s.variants("variants");
    const GridSpec cgrid = s.grid("condition");
    const double delta = s.cfg.get_double("condition.delta_cells") * cgrid.spacing();
    const auto fo = fractional_options(s);
    std::vector<double> svals;
    const auto kmin = static_cast<int>(s.cfg.get_double("s_exponent_min"));
    const auto kmax = static_cast<int>(s.cfg.get_double("s_exponent_max"));
    if (kmax < kmin) throw ConfigError("s_exponent_max must not be below s_exponent_min");
    for (int k = kmin; k <= kmax; ++k) svals.push_back(std::exp2(0.5 * k));
    ScanOptions so;
    so.ratio_bound = s.tol("ratio_bound");
    so.refinement_tol = s.tol("refinement");
    so.grid.half_width = s.cfg.get_double("weighted.half_width");
    so.grid.resolution = s.cfg.get_double("weighted.resolution");
    so.workers = s.run.workers;

    ExperimentOutput out;
    if (s.run.dry_run) {
        for (const auto& m : ms)
            for (double a : alphas)
                out.plan.push_back(m.name() + " at alpha " + num(a) + ": C1 on n = " + std::to_string(cgrid.size()) +
                                   ", " + std::to_string(svals.size()) + " s values, weighted grid n = " +
                                   std::to_string(weighted_norm_grid_size(a, so.grid)));
        return out;
    }
    for (const auto& m : ms)
        for (double a : alphas) {
            const auto cr = check_fractional(m, a, Variant::generator, cgrid, delta, fo);
            std::vector<std::pair<Variant, double>> constants;
            for (auto v : variants) {
                const double c = v == Variant::plus ? cr.c_frac_plus : v == Variant::minus ? cr.c_frac_minus : cr.c_gen;
                constants.emplace_back(v, std::max(cr.m_inf, c));
            }
            auto report = thm22_ratio_scan(m, a, svals, constants, so);
            report.parameters["condition"] = to_json(cr);
            ReportRow cond = make_row("condition_constants", cr.headline(), cr.verdict());
            cond.refinement = cr.history;
            report.add(cond);

            Table plot{"R-" + m.name() + "-a" + num(a), {"s"}, {}};
            for (auto v : variants) plot.header.push_back("R_" + std::string(to_string(v)));
            for (std::size_t i = 0; i < svals.size(); ++i) {
                std::vector<Json> row{svals[i]};
                for (std::size_t k = 0; k < variants.size(); ++k)
                    row.push_back(report.rows[k * (svals.size() + 1) + i].value);
                plot.rows.push_back(std::move(row));
            }
            out.plotdata.push_back(std::move(plot));
            out.results.push_back(std::move(report));
        }
    return out;
}

ExperimentOutput check_multiplier(const Settings& s) {
    const auto m = s.multiplier(s.cfg.get_string("multiplier"));
    const auto alphas = s.alphas();
    const auto variants = s.variants("variants");
    const GridSpec grid = s.grid("grid");
    const double delta = s.cfg.get_double("delta", 4.0 * grid.spacing());
    const double consistency = s.tol("consistency");
    const auto fo = fractional_options(s);
    ExperimentOutput out;
    if (s.run.dry_run) {
        out.plan.push_back("classical and fractional conditions of " + m.name() + " on n = " +
                           std::to_string(grid.size()) + " (refined to " + std::to_string(2 * grid.size()) +
                           "), delta = " + num(delta));
        return out;
    }
    const auto classical = check_classical(m, grid, delta);
    const bool want_gen = std::find(variants.begin(), variants.end(), Variant::generator) != variants.end();
    for (double a : alphas) {
        VerificationReport report;
        report.experiment = "check-multiplier";
        report.parameters = {{"multiplier", m.name()}, {"alpha", a}, {"half_width", grid.half_width()},
                             {"n", grid.size()}, {"delta", delta}};
        report.parameters["classical"] = to_json(classical);
        ReportRow c = make_row("c_classical", classical.c_classical, classical.verdict());
        c.refinement = classical.history;
        report.add(c);
        report.add(make_row("m_inf", classical.m_inf, std::isfinite(classical.m_inf)));

        std::vector<ConditionReport> crs;
        if (want_gen) {
            crs.push_back(check_fractional(m, a, Variant::generator, grid, delta, fo));
        } else {
            for (auto v : variants) crs.push_back(check_fractional(m, a, v, grid, delta, fo));
        }
        for (const auto& cr : crs) {
            auto add = [&](const char* name, double value) {
                if (std::isnan(value)) return;
                ReportRow r = make_row(name, value, cr.verdict(), {{"argmax", cr.argmax}});
                if (std::string(name) == "c_" + cr.condition ||
                    (cr.condition == "plus" && std::string(name) == "c_frac_plus") ||
                    (cr.condition == "minus" && std::string(name) == "c_frac_minus") ||
                    (cr.condition == "generator" && std::string(name) == "c_gen"))
                    r.refinement = cr.history;
                report.add(r);
            };
            add("c_frac_plus", cr.c_frac_plus);
            add("c_frac_minus", cr.c_frac_minus);
            add("c_gen", cr.c_gen);
            if (!std::isnan(cr.generator_consistency)) {
                ReportRow g = make_row("generator_consistency", cr.generator_consistency,
                                       cr.generator_consistency <= consistency);
                g.reference = consistency;
                report.add(g);
            }
            report.parameters["condition_" + cr.condition] = to_json(cr);
            for (const auto& w : cr.warnings) report.notes.push_back(w);
        }
        out.results.push_back(std::move(report));
    }
    return out;
}

ExperimentOutput classical_implies(const Settings& s) {
    const auto alphas = s.alphas();
    const auto ms = s.multipliers("multipliers");
    const GridSpec grid = s.grid("grid");
    const double delta = s.cfg.get_double("condition.delta_cells") * grid.spacing();
    InclusionOptions opt;
    opt.slack = s.cfg.get_double("slack");
    opt.fractional = fractional_options(s);
    ExperimentOutput out;
    if (s.run.dry_run) {
        out.plan.push_back(std::to_string(ms.size()) + " multipliers x " + std::to_string(alphas.size()) +
                           " alphas on n = " + std::to_string(grid.size()) + ", slack " + num(opt.slack));
        return out;
    }
    Table plot{"inclusion-ratio", {"multiplier", "alpha", "ratio"}, {}};
    for (const auto& m : ms)
        for (double a : alphas) {
            auto r = classical_implies_fractional(m, a, grid, delta, opt);
            plot.rows.push_back({m.name(), a, r.rows.back().value});
            out.results.push_back(std::move(r));
        }
    out.plotdata.push_back(std::move(plot));
    return out;
}

ExperimentOutput lp_scan(const Settings& s) {
    const auto ms = s.multipliers("multipliers");
    const auto ps = s.cfg.get_doubles("p");
    for (double p : ps)
        if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("key 'p': exponents must lie in (1, inf)");
    const double a = s.alphas().front();
    const GridSpec grid = s.grid("grid");
    const GridSpec cgrid = s.grid("condition");
    const auto count = s.positive("suite.count");
    const auto seed = s.cfg.get_uint("suite.seed");
    LpOptions lo;
    lo.bound_multiple = s.cfg.get_double("bound_multiple");
    lo.refinement_tol = s.tol("refinement");
    lo.workers = s.run.workers;
    const auto fo = fractional_options(s);
    ExperimentOutput out;
    if (s.run.dry_run) {
        out.plan.push_back(std::to_string(ms.size()) + " multipliers x " + std::to_string(ps.size()) + " exponents, " +
                           std::to_string(count) + " functions, n = " + std::to_string(grid.size()));
        return out;
    }
    const auto suite = lp_test_suite(count, seed);
    for (const auto& m : ms) {
        const auto cr = check_fractional(m, a, Variant::plus, cgrid, 4.0 * cgrid.spacing(), fo);
        lo.c1 = cr.c_frac_plus;
        Table plot{"lp-" + m.name(), {"function"}, {}};
        std::vector<VerificationReport> reports;
        for (double p : ps) {
            auto r = lp_stability_scan(m, p, suite, grid, lo);
            r.parameters["alpha"] = a;
            r.parameters["suite_seed"] = seed;
            plot.header.push_back("ratio_p" + num(p));
            reports.push_back(std::move(r));
        }
        for (std::size_t i = 0; i < suite.size(); ++i) {
            std::vector<Json> row{suite[i].name};
            for (const auto& r : reports) row.push_back(r.rows[i].value);
            plot.rows.push_back(std::move(row));
        }
        for (auto& r : reports) out.results.push_back(std::move(r));
        out.plotdata.push_back(std::move(plot));
    }
    return out;
}

ExperimentOutput gfunc_ratios(const Settings& s) {
    const auto alphas = s.alphas();
    const double p = s.cfg.get_double("p");
    const double factor = s.cfg.get_double("lambda_factor");
    const GridSpec grid = s.grid("grid");
    const auto count = s.positive("suite.count");
    const auto seed = s.cfg.get_uint("suite.seed");
    const double mass_tol = s.tol("kernel_mass");
    RatioOptions base;
    base.p = p;
    base.lower = s.cfg.get_double("bounds.lower");
    base.upper = s.cfg.get_double("bounds.upper");
    base.refinement_tol = s.tol("refinement");
    try {
        base.tq = TimeQuadrature(s.cfg.get_double("time.t_min"), s.cfg.get_double("time.t_max"),
                                 s.cfg.get_uint("time.nodes"));
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("section [time]: ") + e.what());
    }
    for (double a : alphas)
        if (!(factor * a > 1.0)) throw ConfigError("lambda_factor * alpha must exceed 1");
    ExperimentOutput out;
    if (s.run.dry_run) {
        out.plan.push_back(std::to_string(count) + " functions x " + std::to_string(alphas.size()) +
                           " alphas, p = " + num(p) + ", lambda = " + num(factor) + " alpha, n = " +
                           std::to_string(grid.size()) + ", " + std::to_string(base.tq.nodes) + " time nodes");
        return out;
    }
    const auto suite = lp_test_suite(count, seed);
    Table plot{"gfunc-ratios", {"function", "alpha", "G_up", "G_star_up"}, {}};
    for (double a : alphas) {
        RatioOptions opt = base;
        opt.alpha = a;
        opt.lambda = factor * a;
        auto parts = parallel_map(suite.size(), s.run.workers, [&](std::size_t i) {
            return norm_ratio_report(std::vector<NamedFunction>{suite[i]}, grid, opt);
        });
        VerificationReport report = parts.front();
        report.rows.clear();
        for (auto& part : parts)
            for (auto& row : part.rows) report.add(std::move(row));
        report.experiment = "gfunc-ratios";
        report.parameters["suite_seed"] = seed;
        for (std::size_t i = 0; i < suite.size(); ++i) {
            std::vector<Json> row{suite[i].name, a};
            for (const auto& r : report.rows)
                if (r.name.rfind(suite[i].name + ":", 0) == 0) row.push_back(r.value);
            while (row.size() < 4) row.push_back(Json());
            plot.rows.push_back(std::move(row));
        }
        for (double t : {0.1, 1.0, 10.0}) {
            const double mass = kernel_K_lambda_mass(t, opt.lambda, a);
            const double expect = 2.0 / (opt.lambda - 1.0);
            ReportRow row = make_row("K_mass:t=" + num(t), mass, relative_change(mass, expect) <= mass_tol,
                                     {{"alpha", a}, {"lambda", opt.lambda}, {"t", t}});
            row.reference = expect;
            row.tolerance = mass_tol;
            report.add(row);
        }
        out.results.push_back(std::move(report));
    }
    out.plotdata.push_back(std::move(plot));
    return out;
}

ExperimentOutput mc_generator(const Settings& s) {
    const auto alphas = s.alphas();
    const auto xs = s.cfg.get_doubles("x");
    const double t = s.cfg.get_double("t");
    const auto samples = s.positive("samples");
    const auto seed = s.cfg.get_uint("seed");
    const GridSpec grid = s.grid("grid");
    ExperimentOutput out;
    if (s.run.dry_run) {
        out.plan.push_back(std::to_string(alphas.size() * xs.size()) + " estimates with " + std::to_string(samples) +
                           " samples each, t = " + num(t) + ", seed " + std::to_string(seed));
        return out;
    }
    VerificationReport report;
    report.experiment = "mc-generator";
    report.parameters = {{"t", t}, {"samples", samples}, {"seed", seed}, {"half_width", grid.half_width()},
                         {"n", grid.size()}};
    const auto f = SampledFunction::from(grid, [](double x) { return Complex(std::exp(-x * x)); });
    std::vector<std::pair<double, double>> tasks;
    for (double a : alphas)
        for (double x : xs) tasks.emplace_back(a, x);
    auto results = parallel_map(tasks.size(), s.run.workers, [&](std::size_t i) {
        return mc_generator_check(f, tasks[i].second, tasks[i].first, t, samples, RngSeed{seed}.split(i));
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& r = results[i];
        const double dev = std::abs(r.estimate - r.kappa_norm * r.reference);
        const double allowed = 3.0 * r.stderr_ + r.bias;
        ReportRow row = make_row("mc:a=" + num(tasks[i].first) + ":x=" + num(tasks[i].second), dev, dev <= allowed,
                                 {{"alpha", tasks[i].first},
                                  {"x", tasks[i].second},
                                  {"estimate", r.estimate},
                                  {"stderr", r.stderr_},
                                  {"reference", r.reference},
                                  {"kappa_norm", r.kappa_norm},
                                  {"expected_kappa", r.expected_kappa},
                                  {"bias", r.bias}});
        row.reference = allowed;
        report.add(row);
    }
    out.results.push_back(std::move(report));
    return out;
}

// ---------------------------------------------------------------------------
// Catalog and defaults.

struct Entry {
    ExperimentInfo info;
    const char* defaults;
    ExperimentOutput (*run)(const Settings&);
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> list{
        {{"check-multiplier", "classical and fractional condition constants of one multiplier", {"multiplier", "alpha"}},
         R"(multiplier = cos-log
alpha = 0.75
variants = plus, minus, generator

[grid]
half_width = 128
n = 8192

[multiplier]
scale = 1

[quadrature]
near_cut = 1e-2
far_cut = 1e12

[tolerance]
refinement_condition = 0.02
consistency = 1e-6
)",
         check_multiplier},
        {{"classical-implies-fractional", "classical condition implies a finite fractional constant", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
multipliers = cos-log, rational-bump
slack = 20

[grid]
half_width = 128
n = 8192

[condition]
delta_cells = 4

[quadrature]
near_cut = 1e-2
far_cut = 1e12

[tolerance]
refinement_condition = 0.02
)",
         classical_implies},
        {{"gfunc-ratios", "Littlewood-Paley norm ratios and K_lambda mass", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
p = 2
lambda_factor = 2

[grid]
half_width = 64
n = 8192

[suite]
count = 20
seed = 20240611

[time]
t_min = 1e-3
t_max = 1e3
nodes = 256

[bounds]
lower = 0.02
upper = 50

[tolerance]
refinement = 0.05
kernel_mass = 1e-6
)",
         gfunc_ratios},
        {{"lp-scan", "L^p ratio scan of T_m over the frozen suite", {"alpha"}},
         R"(alpha = 0.75
multipliers = cos-log
p = 1.5, 2, 3
bound_multiple = 50

[grid]
half_width = 64
n = 16384

[condition]
half_width = 128
n = 8192

[suite]
count = 20
seed = 20240611

[quadrature]
near_cut = 1e-2
far_cut = 1e12

[tolerance]
refinement = 0.05
refinement_condition = 0.02
)",
         lp_scan},
        {{"mc-generator", "Monte-Carlo estimate of the stable generator against generator_L", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
x = 0, 1
t = 1e-3
samples = 1000000
seed = 20240611

[grid]
half_width = 64
n = 16384
)",
         mc_generator},
        {{"thm22-scan", "scaling profile R(s) of the weighted kernel norm", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
multipliers = constant, cos-log, rational-bump
variants = plus, minus, generator
s_exponent_min = -8
s_exponent_max = 8

[condition]
half_width = 128
n = 8192
delta_cells = 4

[quadrature]
near_cut = 1e-2
far_cut = 1e12

[weighted]
half_width = 4
resolution = 1e-8

[tolerance]
ratio_bound = 10
refinement = 0.05
refinement_condition = 0.02
)",
         thm22_scan},
        {{"verify-lemma21", "L^2 norm of the J function with refinement history", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
diagnostic_alpha = 0.4

[jnorm]
x_min = 1e-8
panels_per_decade = 4
levels = 3

[tolerance]
cauchy = 0.01
)",
         verify_lemma21},
        {{"verify-product-rule", "extended product rule residual on a smooth suite", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
pairs = 10
suite_seed = 20240611

[grid]
half_width = 64
n = 16384

[tolerance]
residual = 1e-8
)",
         verify_product_rule},
        {{"verify-semigroup", "semigroup law, mass and positivity of q_t", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
t = 0.5, 1, 2

[grid]
half_width = 64
n = 16384
max_n = 4194304

[tolerance]
law = 1e-12
mass = 2e-3
negativity = 1e-6
)",
         verify_semigroup},
        {{"verify-subordination", "subordinated q_t against the spectral kernel", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
t = 0.5, 1, 2
s_quad = 256

[grid]
half_width = 64
n = 16384

[tolerance]
sup = 1e-3
)",
         verify_subordination},
        {{"verify-symbols", "quadrature D_a against the spectral symbol, with (n, Y) doubling", {"alpha"}},
         R"(alpha = 0.6, 0.75, 0.9
functions = gaussian, bump

[grid]
half_width = 64
n = 16384

[quadrature]
far_cut = 32
near_cut_cells = 8

[tolerance]
rel_l2 = 1e-2
halving_band = 0.2
)",
         verify_symbols},
    };
    return list;
}

const Entry& entry(const std::string& id) {
    for (const auto& e : entries())
        if (e.info.id == id) return e;
    throw ConfigError("unknown experiment '" + id + "'");
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
    static const std::vector<ExperimentInfo> catalog = [] {
        std::vector<ExperimentInfo> v;
        for (const auto& e : entries()) v.push_back(e.info);
        return v;
    }();
    return catalog;
}

const ExperimentInfo& experiment_info(const std::string& id) { return entry(id).info; }

Config default_config(const std::string& id) {
    auto cfg = Config::parse(entry(id).defaults, "<defaults:" + id + ">");
    cfg.set("experiment", id);
    if (!cfg.has("seed")) cfg.set("seed", "20240611");
    return cfg;
}

Config resolve_config(const std::string& id, const Config& user, bool user_supplied) {
    const auto& e = entry(id);
    if (user.has("experiment") && user.get_string("experiment") != id)
        throw ConfigError("config is for experiment '" + user.get_string("experiment") + "', not '" + id + "'");
    if (user_supplied)
        for (const auto& key : e.info.required) (void)user.get_string(key);  // names the missing key
    Config cfg = user;
    cfg.merge_defaults(default_config(id));
    return cfg;
}

ExperimentOutput run_experiment(const std::string& id, const Config& cfg, const RunContext& ctx) {
    const auto& e = entry(id);
    const Settings s{cfg, ctx};
    ExperimentOutput out;
    try {
        out = e.run(s);
    } catch (const InvalidParameter& err) {
        // Parameter-domain problems discovered while reading the config.
        if (ctx.dry_run) throw ConfigError(err.what());
        throw;
    }
    finish_tables(out);
    return out;
}

}  // namespace fracmul
