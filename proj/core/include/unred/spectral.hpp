#pragma once

// Fourier tools for samples of a 2π-periodic function on the uniform grid
// θ_j = 2πj/n. Transforms are backed by FFTW; plans are cached per size and
// shared between threads.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace unred::spectral {

using Complex = std::complex<double>;

/// Unnormalized real-to-complex transform, n/2+1 coefficients.
std::vector<Complex> forward(std::span<const double> f);

/// Inverse of forward(), including the 1/n normalization.
std::vector<double> inverse(std::span<const Complex> coeffs, std::size_t n);

/// m-th derivative of the trigonometric interpolant, sampled on the grid.
/// Odd derivatives drop the Nyquist mode when n is even.
std::vector<double> derivative(std::span<const double> f, int order = 1);

/// Multiplies mode k (0 ≤ k ≤ n/2) by symbol(k). The symbol must be real
/// and even in k for the result to be the action of a real operator.
template <class Symbol>
std::vector<double> apply_symbol(std::span<const double> f, Symbol&& symbol) {
  auto c = forward(f);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= symbol(static_cast<double>(k));
  return inverse(c, f.size());
}

/// Trigonometric interpolant of periodic samples, evaluable off-grid.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(std::span<const double> samples);

  std::size_t size() const noexcept { return n_; }
  double mean() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_[0].real() / static_cast<double>(n_); }

  double operator()(double theta) const;
  double derivative(double theta) const;
  /// ∫₀^θ of the interpolant (includes the linear mean term).
  double antiderivative(double theta) const;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> coeffs_;
};

/// Values of the interpolant on the refined grid 2πj/(factor·n), j < factor·n.
std::vector<double> upsample(std::span<const double> f, std::size_t factor);

/// Samples of the interpolant with coefficients `coeffs` at θ_j + shift.
std::vector<double> shifted(std::span<const Complex> coeffs, std::size_t n, double shift);

/// Samples on the uniform grid θ_j = 2πj/n.
std::vector<double> grid(std::size_t n);

}  // namespace unred::spectral
