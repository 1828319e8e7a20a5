#include "fracmul/lpaley.hpp"

#include "fracmul/error.hpp"
#include "fracmul/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace fracmul {

TimeQuadrature::TimeQuadrature(double t_min_, double t_max_, std::size_t nodes_)
    : t_min(t_min_), t_max(t_max_), nodes(nodes_) {
    if (!(t_min > 0.0 && t_max > t_min)) throw InvalidParameter("time quadrature needs 0 < t_min < t_max");
    if (nodes < 32) throw InvalidParameter("time quadrature needs at least 32 nodes");
}

std::vector<double> TimeQuadrature::points() const {
    std::vector<double> t(nodes);
    const double step = std::log(t_max / t_min) / static_cast<double>(nodes - 1);
    for (std::size_t i = 0; i < nodes; ++i) t[i] = t_min * std::exp(step * static_cast<double>(i));
    t.back() = t_max;
    return t;
}

std::vector<double> TimeQuadrature::weights() const {
    const auto t = points();
    const double step = std::log(t_max / t_min) / static_cast<double>(nodes - 1);
    std::vector<double> w(nodes);
    for (std::size_t i = 0; i < nodes; ++i) w[i] = step * t[i];
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
}

// Spectrum of f, reused for every time node.
struct Evolution {
    SpectralFunction spectrum;
    double alpha;

    Evolution(const SampledFunction& f, double a) : spectrum(forward_transform(f)), alpha(a) {}

    template <class Sym>
    SampledFunction apply(Sym&& symbol) const {
        SpectralFunction s = spectrum;
        auto c = s.coeffs();
        for (std::size_t k = 0; k < c.size(); ++k) c[k] *= symbol(std::pow(std::abs(s.frequency(k)), alpha / 2.0), s.frequency(k));
        return inverse_transform(s);
    }
    SampledFunction dt_q(double t) const {
        return apply([t](double a, double) { return -a * std::exp(-t * a); });
    }
    SampledFunction q(double t) const {
        return apply([t](double a, double) { return std::exp(-t * a); });
    }
    SampledFunction dx_q(double t) const {
        return apply([t](double a, double xi) { return Complex(0.0, xi) * std::exp(-t * a); });
    }
};

std::vector<double> squared_modulus(const SampledFunction& f) {
    std::vector<double> out(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = std::norm(f[j]);
    return out;
}

// Integrates the per-node squared integrand, estimates the truncated tails and
// returns the square root.
class TimeIntegral {
public:
    TimeIntegral(const GridSpec& grid, const TimeQuadrature& tq) : grid_(grid), tq_(tq), acc_(grid.size(), 0.0) {}

    void add(double weight, const std::vector<double>& value) {
        for (std::size_t j = 0; j < acc_.size(); ++j) acc_[j] += weight * value[j];
    }

    GResult finish(double head_sum, double tail_sum, const char* what) const {
        double body = 0.0;
        std::vector<Complex> root(acc_.size());
        for (std::size_t j = 0; j < acc_.size(); ++j) {
            body += acc_[j];
            root[j] = std::sqrt(std::max(acc_[j], 0.0));
        }
        GResult r{SampledFunction(grid_, std::move(root))};
        r.head_fraction = body > 0.0 ? head_sum / body : 0.0;
        r.tail_fraction = body > 0.0 ? tail_sum / body : 0.0;
        if (r.head_fraction + r.tail_fraction > 0.01) {
            std::ostringstream msg;
            msg << what << ": truncated time integral carries " << 100.0 * (r.head_fraction + r.tail_fraction)
                << "% of the computed part; widen [t_min, t_max] = [" << tq_.t_min << ", " << tq_.t_max << "]";
            throw ConvergenceError(msg.str());
        }
        return r;
    }

private:
    GridSpec grid_;
    TimeQuadrature tq_;
    std::vector<double> acc_;
};

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

// int_0^x K_t^lambda(y) dy in units sigma = t^(2/a).
double k_antiderivative(double x, double sigma, double lambda) {
    return (1.0 - std::pow(1.0 + x / sigma, 1.0 - lambda)) / (lambda - 1.0);
}

// int over |h| < Y of |u(x+h) - u(x)|^2 |h|^(-1-a) dh for the grid function u.
std::vector<double> truncated_energy(const SampledFunction& u, const SampledFunction& du, double y,
                                     const FracParams& base) {
    const auto& grid = u.grid();
    const double h = grid.spacing();
    const double alpha = base.alpha;
    std::vector<double> out(u.size(), 0.0);
    if (y < 4.0 * h) {
        // Second-order Taylor: |u'(x)|^2 int_{|h|<Y} |h|^(1-a) dh.
        const double moment = 2.0 * std::pow(y, 2.0 - alpha) / (2.0 - alpha);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::norm(du[j]) * moment;
        return out;
    }
    // Q_t u is computed spectrally, hence periodic; the inner integral uses the
    // matching periodic rule with the far field beyond one half width.
    const double far = std::min(y, grid.half_width());
    const double near = std::max(2.0 * h, std::min(base.near_cut, 0.5 * far));
    FracParams q(alpha, near, far, Boundary::periodic);
    q.outer_cut = y;
    const bool complex_valued = u.max_imag() > 0.0;
    auto add_part = [&](const SampledFunction& part) {
        const auto c = carre_du_champ(part, q);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += c[j].real();
    };
    SampledFunction re(grid), im(grid);
    for (std::size_t j = 0; j < u.size(); ++j) {
        re[j] = u[j].real();
        im[j] = u[j].imag();
    }
    add_part(re);
    if (complex_valued) add_part(im);
    return out;
}

}  // namespace

GResult g_vertical(const SampledFunction& f, double alpha, const TimeQuadrature& tq) {
    check_alpha(alpha);
    const Evolution ev(f, alpha);
    TimeIntegral integral(f.grid(), tq);
    const auto t = tq.points();
    const auto w = tq.weights();
    std::vector<double> last;
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto sq = squared_modulus(ev.dt_q(t[i]));
        integral.add(w[i] * t[i], sq);
        if (i + 1 == t.size()) last = std::move(sq);
    }
    // Head: t |A f|^2 integrated over (0, t_min).  Tail: power law t^(-1-4/a).
    const double head = 0.5 * tq.t_min * tq.t_min * sum(squared_modulus(ev.dt_q(0.0)));
    const double tail = tq.t_max * tq.t_max * sum(last) * alpha / 4.0;
    return integral.finish(head, tail, "g_vertical");
}

SampledFunction carre_du_champ(const SampledFunction& u, const FracParams& p) {
    const auto plus = lambda_alpha(u, u, p);
    const auto minus = lambda_alpha_neg(u, u, p);
    SampledFunction out = plus.values + minus.values;
    out *= 1.0 / fractional_prefactor(p.alpha);
    return out;
}

GResult g_horizontal(const SampledFunction& f, double alpha, const TimeQuadrature& tq, const FracParams& p) {
    check_alpha(alpha);
    if (p.alpha != alpha) throw InvalidParameter("g_horizontal: FracParams alpha differs from alpha");
    const Evolution ev(f, alpha);
    TimeIntegral integral(f.grid(), tq);
    const auto t = tq.points();
    const auto w = tq.weights();
    std::vector<double> first, last;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double y = std::pow(t[i], 2.0 / alpha);
        auto inner = truncated_energy(ev.q(t[i]), ev.dx_q(t[i]), y, p);
        integral.add(w[i] * t[i], inner);
        if (i == 0) first = inner;
        if (i + 1 == t.size()) last = std::move(inner);
    }
    // Near t = 0 the integrand t * inner grows like t^(1 + 2(2-a)/a).
    const double head_power = 2.0 + 2.0 * (2.0 - alpha) / alpha;
    const double head = tq.t_min * tq.t_min * sum(first) / head_power;
    const double tail = tq.t_max * tq.t_max * sum(last) * alpha / 4.0;
    return integral.finish(head, tail, "g_horizontal");
}

GResult g_full(const SampledFunction& f, double alpha, const TimeQuadrature& tq, const FracParams& p) {
    const auto up = g_vertical(f, alpha, tq);
    const auto right = g_horizontal(f, alpha, tq, p);
    SampledFunction values(f.grid());
    for (std::size_t j = 0; j < f.size(); ++j)
        values[j] = std::sqrt(std::norm(up.values[j]) + std::norm(right.values[j]));
    return {std::move(values), up.head_fraction + right.head_fraction, up.tail_fraction + right.tail_fraction};
}

double kernel_K_lambda(double t, double lambda, double x, double alpha) {
    check_alpha(alpha);
    if (!(lambda > 1.0)) throw InvalidParameter("K_t^lambda needs lambda > 1");
    if (!(t > 0.0)) throw InvalidParameter("K_t^lambda needs t > 0");
    const double sigma = std::pow(t, 2.0 / alpha);
    return std::pow(sigma / (sigma + std::abs(x)), lambda) / sigma;
}

double kernel_K_lambda_mass(double t, double lambda, double alpha) {
    const double sigma = std::pow(t, 2.0 / alpha);
    auto k = [&](double x) { return kernel_K_lambda(t, lambda, x, alpha); };
    const double far = 1e12 * sigma;
    double half = quad::graded(k, 0.0, sigma, quad::Grade::none) + quad::geometric(k, sigma, far);
    // Beyond `far` the kernel is sigma^(lambda-1) x^(-lambda) to relative O(sigma/x).
    half += std::pow(sigma, lambda - 1.0) * std::pow(far, 1.0 - lambda) / (lambda - 1.0);
    return 2.0 * half;
}

GResult g_star_vertical(const SampledFunction& f, double alpha, double lambda, const TimeQuadrature& tq) {
    check_alpha(alpha);
    if (!(lambda > 1.0)) throw InvalidParameter("G* needs lambda > 1");
    const auto& grid = f.grid();
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const Evolution ev(f, alpha);
    TimeIntegral integral(grid, tq);
    const auto t = tq.points();
    const auto w = tq.weights();

    // Linear convolution with cell-averaged kernel weights on a 2n circle.
    auto smooth = [&](double time, const std::vector<double>& v) {
        const double sigma = std::pow(time, 2.0 / alpha);
        std::vector<Complex> padded(2 * n), kernel(2 * n);
        for (std::size_t j = 0; j < n; ++j) padded[j] = v[j];
        kernel[0] = 2.0 * k_antiderivative(0.5 * h, sigma, lambda);
        for (std::size_t r = 1; r < n; ++r) {
            const double x = static_cast<double>(r) * h;
            const double cell = k_antiderivative(x + 0.5 * h, sigma, lambda) - k_antiderivative(x - 0.5 * h, sigma, lambda);
            kernel[r] = cell;
            kernel[2 * n - r] = cell;
        }
        const auto conv = circular_convolution(padded, kernel);
        std::vector<double> out(n);
        for (std::size_t j = 0; j < n; ++j) out[j] = conv[j].real();
        return out;
    };

    std::vector<double> first, last;
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto sq = smooth(t[i], squared_modulus(ev.dt_q(t[i])));
        integral.add(w[i] * t[i], sq);
        if (i == 0) first = sq;
        if (i + 1 == t.size()) last = std::move(sq);
    }
    const double head = 0.5 * tq.t_min * tq.t_min * sum(first);
    const double tail = tq.t_max * tq.t_max * sum(last) * alpha / 4.0;
    return integral.finish(head, tail, "g_star_vertical");
}

double measured_domination_constant(const SampledFunction& f, const MultiplierSpec& m, double alpha, double lambda,
                                    double c1, const TimeQuadrature& tq) {
    if (!(c1 > 0.0)) throw InvalidParameter("domination constant needs C1 > 0");
    const auto up = g_vertical(apply_spectral_multiplier(f, m), alpha, tq).values;
    const auto star = g_star_vertical(f, alpha, lambda, tq).values;
    const double floor = 1e-8 * star.sup_norm();
    double worst = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        if (std::abs(star[j]) > floor) worst = std::max(worst, std::abs(up[j]) / (c1 * std::abs(star[j])));
    return worst;
}

namespace {

struct Ratios {
    double up;
    double star;
};

Ratios ratios(const SampledFunction& f, const RatioOptions& opt, const TimeQuadrature& tq) {
    const double norm = lp_norm(f, opt.p);
    if (norm == 0.0) throw InvalidParameter("norm ratios need a nonzero function");
    Ratios r{lp_norm(g_vertical(f, opt.alpha, tq).values, opt.p) / norm, std::nan("")};
    if (opt.p >= 2.0) r.star = lp_norm(g_star_vertical(f, opt.alpha, opt.lambda, tq).values, opt.p) / norm;
    return r;
}

void add_rows(VerificationReport& report, const std::string& name, const Ratios& coarse, const Ratios& fine,
              const RatioOptions& opt) {
    auto row = [&](const char* kind, double a, double b) {
        ReportRow r;
        r.name = name + ":" + kind;
        r.value = b;
        r.refinement = {a, b};
        r.tolerance = opt.refinement_tol;
        r.pass = std::isfinite(b) && b >= opt.lower && b <= opt.upper && relative_change(a, b) < opt.refinement_tol;
        r.params = {{"ratio", kind}, {"p", opt.p}, {"alpha", opt.alpha}};
        report.add(std::move(r));
    };
    row("G_up", coarse.up, fine.up);
    if (opt.p >= 2.0) row("G_star_up", coarse.star, fine.star);
}

VerificationReport empty_report(const RatioOptions& opt) {
    VerificationReport report;
    report.experiment = "norm-ratios";
    report.parameters = {{"alpha", opt.alpha}, {"p", opt.p},           {"lambda", opt.lambda},
                         {"lower", opt.lower}, {"upper", opt.upper},   {"t_min", opt.tq.t_min},
                         {"t_max", opt.tq.t_max}, {"nodes", opt.tq.nodes}};
    if (opt.p < 2.0) report.notes.push_back("G* ratios are only formed for p >= 2");
    return report;
}

}  // namespace

VerificationReport norm_ratio_report(const std::vector<NamedFunction>& suite, const GridSpec& grid,
                                     const RatioOptions& opt) {
    auto report = empty_report(opt);
    report.parameters["half_width"] = grid.half_width();
    report.parameters["n"] = grid.size();
    for (const auto& item : suite) {
        const auto coarse = ratios(SampledFunction::from(grid, item.fn), opt, opt.tq);
        const auto fine = ratios(SampledFunction::from(grid.refined(), item.fn), opt, opt.tq.refined());
        add_rows(report, item.name, coarse, fine, opt);
    }
    return report;
}

VerificationReport norm_ratio_report(const std::vector<SampledFunction>& suite, const RatioOptions& opt) {
    auto report = empty_report(opt);
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const auto coarse = ratios(suite[i], opt, opt.tq);
        const auto fine = ratios(suite[i], opt, opt.tq.refined());
        add_rows(report, "f" + std::to_string(i), coarse, fine, opt);
    }
    return report;
}

}  // namespace fracmul
