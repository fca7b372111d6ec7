#pragma once

// The Hopf bundle S³ → S² with structure group U(1) acting by right
// multiplication q ↦ q·e^{iφ}, its mechanical connection, horizontal lifts
// of the modified connection 𝒜 + ς dθ and their holonomy.

#include <cstddef>
#include <functional>
#include <vector>

#include "unred/quaternion.hpp"
#include "unred/vec.hpp"

namespace unred {

/// (|z₁|² − |z₂|², 2 Re z₁z̄₂, 2 Im z₁z̄₂). Throws NormError if |q| is off
/// by more than 1e-8.
Vec3 hopf_project(const UnitQuaternion& q);

/// Fibre generator at q: the velocity of φ ↦ q·e^{iφ} at φ = 0.
Quaternion fibre_generator(const Quaternion& q) noexcept;

/// A point of the fibre over p, chosen continuously away from p = (−1,0,0).
UnitQuaternion canonical_lift(const Vec3& p);

/// Closed path on S², K+1 samples at θ_m = 2πm/K with the last equal to the first.
class SpherePath {
 public:
  /// Throws NormError for samples off the sphere by more than 1e-12 and
  /// PeriodicityError if the path does not close within 1e-10.
  explicit SpherePath(std::vector<Vec3> samples);

  std::size_t intervals() const noexcept { return samples_.size() - 1; }
  const std::vector<Vec3>& samples() const noexcept { return samples_; }

  /// ρ(θ) = cos θ a + sin θ b for orthonormal a, b.
  static SpherePath great_circle(std::size_t k, const Vec3& a = {0, 1, 0}, const Vec3& b = {0, 0, 1});
  static SpherePath constant(std::size_t k, const Vec3& p);
  /// Samples ρ on the grid and closes it with ρ(0).
  static SpherePath sample(std::size_t k, const std::function<Vec3(double)>& rho);

 private:
  std::vector<Vec3> samples_;
};

/// ς on the same K+1 grid as the path; periodic within 1e-10.
class VerticalProfile {
 public:
  explicit VerticalProfile(std::vector<double> values);

  std::size_t intervals() const noexcept { return values_.size() - 1; }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Trapezoidal ∫₀^{2π} ς dθ (spectrally accurate for periodic data).
  double integral() const noexcept;

  static VerticalProfile constant(std::size_t k, double c);
  static VerticalProfile sample(std::size_t k, const std::function<double(double)>& f);

 private:
  std::vector<double> values_;
};

/// ς(θ) = ς₀ + ∫₀^θ f^v, computed from the trigonometric interpolant of f^v on
/// K points. Throws PeriodicityError if |ς(2π) − ς(0)| > 1e-8.
VerticalProfile vertical_ode(const std::function<double(double)>& fv, double sigma0, std::size_t k);

struct HolonomyResult {
  double phase = 0.0;          // in (−π, π]
  double closure_error = 0.0;  // |s(2π) − s(0)| in ℝ⁴
};

struct LiftResult {
  std::vector<UnitQuaternion> path;  // K+1 samples
  HolonomyResult holonomy;
  double max_projection_error = 0.0;
};

/// Integrates ṡ = hor_s(ρ̇) − ς V(s) with RK4 and per-step renormalization.
/// Path velocities come from the trigonometric interpolant of the samples.
/// Throws LengthMismatch, NormError, or ProjectionDrift (s₀ not over ρ(0)
/// within 1e-8, or the lift leaving ρ by more than 1e-6).
LiftResult horizontal_lift(const SpherePath& rho, const VerticalProfile& sigma, const UnitQuaternion& s0);

/// horizontal_lift from canonical_lift(ρ(0)).
HolonomyResult holonomy(const SpherePath& rho, const VerticalProfile& sigma);

/// arg Σ a_k conj(b_k) over the complex pairs, in (−π, π]. For b = a·e^{iφ}
/// this is −φ, so the holonomy phase is π + ∫ς dθ along a great circle.
double fibre_phase(const UnitQuaternion& a, const UnitQuaternion& b);

}  // namespace unred
