#include "unred/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "unred/vec.hpp"

namespace unred::spectral {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }

  // Plans are created with FFTW_UNALIGNED so they can run on any buffer
  // through the new-array execute interface, which is thread safe.
  const Plans& get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    const int ni = static_cast<int>(n);
    auto* in = fftw_alloc_real(n);
    auto* out = fftw_alloc_complex(n / 2 + 1);
    Plans p;
    p.r2c = fftw_plan_dft_r2c_1d(ni, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r_1d(ni, out, in, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    return plans_.emplace(n, p).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, Plans> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

std::vector<Complex> forward(std::span<const double> f) {
  const std::size_t n = f.size();
  if (n == 0) throw std::invalid_argument("spectral::forward: empty input");
  std::vector<double> in(f.begin(), f.end());
  std::vector<Complex> out(n / 2 + 1);
  fftw_execute_dft_r2c(cache().get(n).r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse(std::span<const Complex> coeffs, std::size_t n) {
  if (coeffs.size() != n / 2 + 1) throw std::invalid_argument("spectral::inverse: coefficient count mismatch");
  // c2r overwrites its input.
  std::vector<Complex> in(coeffs.begin(), coeffs.end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(cache().get(n).c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<double> derivative(std::span<const double> f, int order) {
  const std::size_t n = f.size();
  if (order < 0) throw std::invalid_argument("spectral::derivative: negative order");
  auto c = forward(f);
  // i^order, exactly.
  static constexpr Complex kUnitPowers[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  const Complex unit = kUnitPowers[order % 4];
  for (std::size_t k = 0; k < c.size(); ++k) {
    Complex factor = unit * std::pow(static_cast<double>(k), order);
    if (order % 2 == 1 && n % 2 == 0 && k == n / 2) factor = 0.0;
    c[k] *= factor;
  }
  return inverse(c, n);
}

std::vector<double> grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
  return g;
}

TrigInterpolant::TrigInterpolant(std::span<const double> samples)
    : n_(samples.size()), coeffs_(forward(samples)) {}

// f(θ) = (1/n)[c₀ + 2 Σ_{0<k<n/2} Re(c_k e^{ikθ}) + Re(c_{n/2}) cos(nθ/2)]
// where the last term is present only for even n.
double TrigInterpolant::operator()(double theta) const {
  const std::size_t kmax = coeffs_.size() - 1;
  const bool nyquist = n_ % 2 == 0;
  const Complex step = std::polar(1.0, theta);
  Complex e = 1.0;
  double acc = coeffs_[0].real();
  for (std::size_t k = 1; k <= kmax; ++k) {
    e *= step;
    if (nyquist && k == kmax) {
      acc += coeffs_[k].real() * std::cos(static_cast<double>(k) * theta);
    } else {
      acc += 2.0 * (coeffs_[k] * e).real();
    }
  }
  return acc / static_cast<double>(n_);
}

double TrigInterpolant::derivative(double theta) const {
  const std::size_t kmax = coeffs_.size() - 1;
  const bool nyquist = n_ % 2 == 0;
  const Complex step = std::polar(1.0, theta);
  Complex e = 1.0;
  double acc = 0.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    e *= step;
    const double kd = static_cast<double>(k);
    if (nyquist && k == kmax) {
      acc -= kd * coeffs_[k].real() * std::sin(kd * theta);
    } else {
      acc += 2.0 * (Complex(0.0, kd) * coeffs_[k] * e).real();
    }
  }
  return acc / static_cast<double>(n_);
}

double TrigInterpolant::antiderivative(double theta) const {
  const std::size_t kmax = coeffs_.size() - 1;
  const bool nyquist = n_ % 2 == 0;
  const Complex step = std::polar(1.0, theta);
  Complex e = 1.0;
  double acc = coeffs_[0].real() * theta;
  for (std::size_t k = 1; k <= kmax; ++k) {
    e *= step;
    const double kd = static_cast<double>(k);
    if (nyquist && k == kmax) {
      acc += coeffs_[k].real() * std::sin(kd * theta) / kd;
    } else {
      acc += 2.0 * (coeffs_[k] * (e - 1.0) / Complex(0.0, kd)).real();
    }
  }
  return acc / static_cast<double>(n_);
}

std::vector<double> upsample(std::span<const double> f, std::size_t factor) {
  const std::size_t n = f.size();
  if (factor == 0) throw std::invalid_argument("spectral::upsample: factor must be positive");
  if (factor == 1) return {f.begin(), f.end()};
  const std::size_t m = n * factor;
  const auto c = forward(f);
  std::vector<Complex> padded(m / 2 + 1, Complex{});
  const double scale = static_cast<double>(factor);
  for (std::size_t k = 0; k < c.size(); ++k) padded[k] = c[k] * scale;
  // The Nyquist cosine of the coarse grid becomes an interior mode and is
  // split evenly between ±n/2.
  if (n % 2 == 0) padded[n / 2] = 0.5 * c[n / 2].real() * scale;
  return inverse(padded, m);
}

std::vector<double> shifted(std::span<const Complex> coeffs, std::size_t n, double shift) {
  std::vector<Complex> c(coeffs.begin(), coeffs.end());
  for (std::size_t k = 1; k < c.size(); ++k) {
    const double kd = static_cast<double>(k);
    if (n % 2 == 0 && k == n / 2) {
      c[k] = c[k].real() * std::cos(kd * shift);
    } else {
      c[k] *= std::polar(1.0, kd * shift);
    }
  }
  return inverse(c, n);
}

}  // namespace unred::spectral
