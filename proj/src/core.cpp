#include "fracmul/core.hpp"

#include "fracmul/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace fracmul {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// FFTW planning is not thread-safe; execution on distinct arrays is.
fftw_plan plan_for(std::size_t n, int sign) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_pair(n, sign);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    fftw_complex* scratch = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch,
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    cache.emplace(key, plan);
    return plan;
}

}  // namespace

GridSpec::GridSpec(double half_width, std::size_t n) : half_width_(half_width), n_(n) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw InvalidParameter("grid half width must be positive and finite");
    if (n < 8 || !std::has_single_bit(n))
        throw InvalidParameter("grid size must be a power of two >= 8, got " + std::to_string(n));
}

double GridSpec::frequency_spacing() const { return std::numbers::pi / half_width_; }

double GridSpec::frequency(std::size_t k) const {
    auto signed_k = static_cast<long long>(k);
    if (k >= n_ / 2) signed_k -= static_cast<long long>(n_);
    return static_cast<double>(signed_k) * frequency_spacing();
}

double GridSpec::nyquist() const { return static_cast<double>(n_ / 2) * frequency_spacing(); }

std::vector<double> GridSpec::points() const {
    std::vector<double> xs(n_);
    for (std::size_t j = 0; j < n_; ++j) xs[j] = point(j);
    return xs;
}

SampledFunction::SampledFunction(GridSpec grid) : grid_(grid), values_(grid.size()) {}

SampledFunction::SampledFunction(GridSpec grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw InvalidParameter("sample count does not match grid size");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw EvaluationError("sampled function has a non-finite entry");
}

SampledFunction SampledFunction::from(const GridSpec& grid, const std::function<Complex(double)>& f) {
    std::vector<Complex> values(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) values[j] = f(grid.point(j));
    return SampledFunction(grid, std::move(values));
}

double SampledFunction::sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SampledFunction::max_imag() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
}

std::vector<double> SampledFunction::real_part() const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](Complex v) { return v.real(); });
    return out;
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& other) {
    if (!(grid_ == other.grid_)) throw InvalidParameter("grid mismatch");
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
    return *this;
}

SampledFunction& SampledFunction::operator-=(const SampledFunction& other) {
    if (!(grid_ == other.grid_)) throw InvalidParameter("grid mismatch");
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
    return *this;
}

SampledFunction& SampledFunction::operator*=(Complex c) {
    for (auto& v : values_) v *= c;
    return *this;
}

SampledFunction operator+(SampledFunction a, const SampledFunction& b) { return a += b; }
SampledFunction operator-(SampledFunction a, const SampledFunction& b) { return a -= b; }
SampledFunction operator*(Complex c, SampledFunction a) { return a *= c; }

SampledFunction pointwise_product(const SampledFunction& a, const SampledFunction& b) {
    if (!(a.grid() == b.grid())) throw InvalidParameter("grid mismatch");
    SampledFunction out(a.grid());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
    return out;
}

SpectralFunction::SpectralFunction(GridSpec grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size())
        throw InvalidParameter("coefficient count does not match grid size");
}

double SpectralFunction::l2_norm() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return std::sqrt(s * grid_.frequency_spacing());
}

void dft_inplace(std::span<Complex> data, int sign) {
    if (data.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_for(data.size(), sign), buf, buf);
}

SpectralFunction forward_transform(const SampledFunction& f) {
    const auto& grid = f.grid();
    std::vector<Complex> c(f.values().begin(), f.values().end());
    dft_inplace(c, -1);
    const double scale = grid.spacing() / kSqrt2Pi;
    // exp(i xi_k L) = (-1)^k accounts for the grid starting at -L.
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= (k % 2 == 0) ? scale : -scale;
    return SpectralFunction(grid, std::move(c));
}

SampledFunction inverse_transform(const SpectralFunction& spectrum) {
    const auto& grid = spectrum.grid();
    std::vector<Complex> v(spectrum.coeffs().begin(), spectrum.coeffs().end());
    const double scale = kSqrt2Pi / grid.spacing() / static_cast<double>(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= (k % 2 == 0) ? scale : -scale;
    dft_inplace(v, +1);
    return SampledFunction(grid, std::move(v));
}

double lp_norm(const SampledFunction& f, double p) {
    if (std::isinf(p) && p > 0) return f.sup_norm();
    if (!(p >= 1.0)) throw InvalidParameter("lp_norm requires p >= 1");
    double s = 0.0;
    if (p == 2.0) {
        for (const auto& v : f.values()) s += std::norm(v);
        return std::sqrt(s * f.grid().spacing());
    }
    for (const auto& v : f.values()) s += std::pow(std::abs(v), p);
    return std::pow(s * f.grid().spacing(), 1.0 / p);
}

std::vector<Complex> sample_symbol(const Symbol& symbol, const GridSpec& grid) {
    std::vector<Complex> m(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double xi = grid.frequency(k);
        m[k] = symbol(xi);
        if (!std::isfinite(m[k].real()) || !std::isfinite(m[k].imag())) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "multiplier is not finite at frequency " << xi;
            throw EvaluationError(msg.str());
        }
    }
    return m;
}

SampledFunction apply_symbol(const SampledFunction& f, const Symbol& symbol) {
    auto spectrum = forward_transform(f);
    const auto m = sample_symbol(symbol, f.grid());
    auto c = spectrum.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= m[k];
    return inverse_transform(spectrum);
}

SampledFunction kernel_from_symbol(const Symbol& symbol, const GridSpec& grid) {
    auto kernel = inverse_transform(SpectralFunction(grid, sample_symbol(symbol, grid)));
    kernel *= 1.0 / kSqrt2Pi;
    return kernel;
}

std::vector<Complex> causal_convolution(std::span<const Complex> f, std::span<const double> weights) {
    const std::size_t n = f.size();
    const std::size_t k = std::min(weights.size(), n);
    if (n == 0) return {};
    const std::size_t m = std::bit_ceil(n + k);
    std::vector<Complex> a(m), b(m);
    std::copy(f.begin(), f.end(), a.begin());
    for (std::size_t i = 0; i < k; ++i) b[i] = weights[i];
    dft_inplace(a, -1);
    dft_inplace(b, -1);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    dft_inplace(a, +1);
    std::vector<Complex> out(n);
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j] * inv;
    return out;
}

std::vector<Complex> circular_convolution(std::span<const Complex> f, std::span<const Complex> kernel) {
    const std::size_t n = f.size();
    if (kernel.size() != n) throw InvalidParameter("circular convolution size mismatch");
    std::vector<Complex> a(f.begin(), f.end()), b(kernel.begin(), kernel.end());
    dft_inplace(a, -1);
    dft_inplace(b, -1);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= b[i] * inv;
    dft_inplace(a, +1);
    return a;
}

Complex integrate(const SampledFunction& f) {
    Complex s = 0.0;
    for (const auto& v : f.values()) s += v;
    return s * f.grid().spacing();
}

}  // namespace fracmul
