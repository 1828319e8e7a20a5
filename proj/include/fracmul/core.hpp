#pragma once

// Uniform symmetric grids, sampled functions and the discrete approximation of
// the unitary Fourier transform
//
//     F(f)(xi) = 1/sqrt(2 pi) * int f(y) exp(-i xi y) dy
//
// used by every other module.  Transforms are trapezoid sums on the grid, so a
// grid of half width L and n points carries the frequencies xi_k = k*pi/L,
// k = -n/2 .. n/2-1, stored in FFT order (k = 0, 1, .., n/2-1, -n/2, .., -1).

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracmul {

using Complex = std::complex<double>;

/// A complex symbol evaluated pointwise on the frequency axis.
using Symbol = std::function<Complex(double)>;

class GridSpec {
public:
    /// Throws InvalidParameter unless half_width > 0, n >= 8 and n is a power of two.
    GridSpec(double half_width, std::size_t n);

    double half_width() const { return half_width_; }
    std::size_t size() const { return n_; }
    double spacing() const { return 2.0 * half_width_ / static_cast<double>(n_); }
    double point(std::size_t j) const { return -half_width_ + static_cast<double>(j) * spacing(); }
    /// Index of the grid point x = 0.
    std::size_t origin_index() const { return n_ / 2; }

    double frequency_spacing() const;
    /// Frequency of coefficient k in FFT order.
    double frequency(std::size_t k) const;
    double nyquist() const;

    std::vector<double> points() const;

    /// Same half width, twice the points.
    GridSpec refined() const { return GridSpec(half_width_, 2 * n_); }

    bool operator==(const GridSpec&) const = default;

private:
    double half_width_;
    std::size_t n_;
};

class SampledFunction {
public:
    explicit SampledFunction(GridSpec grid);  // zeros
    SampledFunction(GridSpec grid, std::vector<Complex> values);

    static SampledFunction from(const GridSpec& grid, const std::function<Complex(double)>& f);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const Complex> values() const { return values_; }
    std::span<Complex> values() { return values_; }
    const Complex& operator[](std::size_t j) const { return values_[j]; }
    Complex& operator[](std::size_t j) { return values_[j]; }

    double sup_norm() const;
    /// Largest |Im f| over the grid.
    double max_imag() const;
    std::vector<double> real_part() const;

    SampledFunction& operator+=(const SampledFunction& other);
    SampledFunction& operator-=(const SampledFunction& other);
    SampledFunction& operator*=(Complex c);

private:
    GridSpec grid_;
    std::vector<Complex> values_;
};

SampledFunction operator+(SampledFunction a, const SampledFunction& b);
SampledFunction operator-(SampledFunction a, const SampledFunction& b);
SampledFunction operator*(Complex c, SampledFunction a);
/// Pointwise product.
SampledFunction pointwise_product(const SampledFunction& a, const SampledFunction& b);

class SpectralFunction {
public:
    SpectralFunction(GridSpec grid, std::vector<Complex> coeffs);

    const GridSpec& grid() const { return grid_; }
    std::span<const Complex> coeffs() const { return coeffs_; }
    std::span<Complex> coeffs() { return coeffs_; }
    double frequency(std::size_t k) const { return grid_.frequency(k); }
    static constexpr const char* convention = "unitary";

    /// (sum |F_k|^2 dxi)^(1/2); equals lp_norm(f, 2) by discrete Parseval.
    double l2_norm() const;

private:
    GridSpec grid_;
    std::vector<Complex> coeffs_;
};

/// In-place unnormalized DFT: sign = -1 forward (exp(-2 pi i jk/n)), +1 backward.
void dft_inplace(std::span<Complex> data, int sign);

SpectralFunction forward_transform(const SampledFunction& f);
SampledFunction inverse_transform(const SpectralFunction& spectrum);

/// Riemann-sum L^p norm; p = infinity gives the grid maximum.
double lp_norm(const SampledFunction& f, double p);

/// inverse_transform(symbol(xi) * forward_transform(f)).  Throws EvaluationError
/// naming the frequency if the symbol is not finite there.
SampledFunction apply_symbol(const SampledFunction& f, const Symbol& symbol);

/// The convolution kernel of the multiplier with the given symbol:
///
///     kappa(x) = 1/(2 pi) int m(xi) exp(i xi x) dxi,
///
/// so that f * kappa == apply_symbol(f, m) and forward_transform(kappa) equals
/// m/sqrt(2 pi).  For m == 1 this is the discrete delta with value 1/spacing in
/// the origin bin.  Probability kernels built this way have unit mass.
SampledFunction kernel_from_symbol(const Symbol& symbol, const GridSpec& grid);

/// Samples of the symbol on the frequency grid in FFT order.
std::vector<Complex> sample_symbol(const Symbol& symbol, const GridSpec& grid);

/// Zero-padded linear convolution: out_j = sum_{k=0}^{K-1} weights[k] * f[j-k],
/// with f taken as zero outside [0, n).  Computed with FFTs.
std::vector<Complex> causal_convolution(std::span<const Complex> f, std::span<const double> weights);

/// Periodic convolution out_j = sum_r kernel[r] * f[(j-r) mod n].
std::vector<Complex> circular_convolution(std::span<const Complex> f, std::span<const Complex> kernel);

/// Riemann sum of f over the grid (trapezoid on a periodic grid).
Complex integrate(const SampledFunction& f);

}  // namespace fracmul
