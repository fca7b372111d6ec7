#pragma once

// Discrete differential geometry of closed, positively oriented plane curves
// sampled on the uniform parameter grid θ_j = 2πj/N.
//
// Conventions shared by every module: the normal is n = J t with J the
// counterclockwise quarter turn, so a counterclockwise circle has an inward
// normal and positive curvature.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "unred/vec.hpp"

namespace unred {

/// Regularity floor, relative to the mean sample spacing (or mean speed).
inline constexpr double kRegularityFloor = 1e-6;

class DiscreteCurve {
 public:
  /// Validates: N ≥ 8 and even, no collapsed segments, positive signed area.
  /// Throws RegularityError otherwise.
  explicit DiscreteCurve(std::vector<Vec2> samples);

  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const Vec2> samples() const noexcept { return samples_; }
  const Vec2& operator[](std::size_t j) const noexcept { return samples_[j]; }
  double theta(std::size_t j) const noexcept;

  std::vector<double> xs() const;
  std::vector<double> ys() const;

  /// Shoelace area of the sample polygon.
  double signed_area() const noexcept;
  /// Perimeter of the sample polygon.
  double polygon_perimeter() const noexcept;

 private:
  std::vector<Vec2> samples_;
};

/// Samples a parametric curve c(θ) on the uniform grid.
DiscreteCurve sample_curve(std::size_t n, const std::function<Vec2(double)>& c);

namespace shapes {
DiscreteCurve circle(std::size_t n, double radius = 1.0, Vec2 center = {});
DiscreteCurve ellipse(std::size_t n, double a, double b);
/// Polar curve r(θ) = 1 + bump·cos 4θ, a smooth rounded square.
DiscreteCurve rounded_square(std::size_t n, double bump = 0.05);
}  // namespace shapes

enum class DerivBackend { spectral, central_difference };

/// θ-derivative of periodic samples with the given backend.
std::vector<double> periodic_derivative(std::span<const double> f, DerivBackend backend, int order = 1);

struct FrenetData {
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;
  std::vector<double> curvature;
  std::vector<double> speed;  // |c_θ|
  DerivBackend backend = DerivBackend::spectral;

  std::size_t size() const noexcept { return speed.size(); }
};

/// Throws RegularityError when the speed drops below kRegularityFloor times
/// its mean somewhere.
FrenetData frenet(const DiscreteCurve& curve, DerivBackend backend = DerivBackend::spectral);

/// D_θ f = (1/|c_θ|) ∂_θ f.
std::vector<double> arclength_derivative(const FrenetData& frenet, std::span<const double> f);

struct VelocitySplit {
  std::vector<double> v;  // tangential
  std::vector<double> h;  // normal
};

/// u = v t + h n, pointwise.
VelocitySplit decompose_velocity(const FrenetData& frenet, std::span<const Vec2> u);
std::vector<Vec2> recompose_velocity(const FrenetData& frenet, std::span<const double> v,
                                     std::span<const double> h);

/// ∮ κ dl by the trapezoidal rule; 2π for embedded positive curves.
double total_turning(const FrenetData& frenet);

/// Trapezoidal ∮ dl.
double perimeter(const FrenetData& frenet);

struct FrenetIdentityResidual {
  double tangent = 0.0;  // max_j |D_θ t − κ n|
  double normal = 0.0;   // max_j |D_θ n + κ t|
};

FrenetIdentityResidual frenet_identity_residual(const FrenetData& frenet);

/// Arc length from sample 0 to each sample, rescaled so the full length is 2π.
std::vector<double> arclength_positions(const DiscreteCurve& curve);

/// Parameter values θ*_m where arc length reaches m·L/M, starting at the
/// arc-length position of sample 0. Spectrally accurate.
std::vector<double> arclength_parameters(const DiscreteCurve& curve, std::size_t m);

/// Trigonometric interpolation of the curve at arbitrary parameter values.
std::vector<Vec2> evaluate_curve(const DiscreteCurve& curve, std::span<const double> thetas);

/// Canonical representative of the reparametrization orbit: M samples with
/// uniform arc-length spacing.
DiscreteCurve resample_by_arclength(const DiscreteCurve& curve, std::size_t m);

/// c∘φ for an orientation-preserving circle diffeomorphism φ (given as a
/// lift ℝ → ℝ with φ(θ + 2π) = φ(θ) + 2π).
DiscreteCurve reparametrize(const DiscreteCurve& curve, const std::function<double(double)>& phi);

/// Distance on the shape space: both curves are resampled by arc length to a
/// common size, then the RMS pointwise distance is minimized over the base
/// point (circular shift, refined below grid spacing). Symmetric.
double shape_distance(const DiscreteCurve& a, const DiscreteCurve& b);

}  // namespace unred
