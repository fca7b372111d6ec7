#pragma once

// The curve-independent Sobolev metric operator P = 1 − A² ∂θ² on periodic
// samples, and the metric pairing it induces on velocity fields.

#include <cstddef>
#include <span>
#include <vector>

#include "unred/curve.hpp"

namespace unred {

enum class SobolevBackend { spectral, tridiagonal };

class SobolevOperator {
 public:
  /// Throws std::invalid_argument for A < 0 or n == 0.
  SobolevOperator(double length_scale, std::size_t n, SobolevBackend backend = SobolevBackend::spectral);

  double length_scale() const noexcept { return a_; }
  std::size_t size() const noexcept { return n_; }
  SobolevBackend backend() const noexcept { return backend_; }

  /// f − A² ∂θ² f.
  std::vector<double> apply(std::span<const double> f) const;
  /// The unique f with apply(f) = g.
  std::vector<double> solve(std::span<const double> g) const;

  /// Componentwise action on a planar vector field.
  std::vector<Vec2> apply(std::span<const Vec2> u) const;

 private:
  void check(std::size_t got) const;

  double a_;
  std::size_t n_;
  SobolevBackend backend_;
};

/// ∫ ⟨u, P w⟩ dl with the trapezoidal rule on the θ grid.
double metric_pair(const SobolevOperator& op, const FrenetData& frenet, std::span<const Vec2> u,
                   std::span<const Vec2> w);

/// ∫ f · P g dl for scalar fields along the curve.
double scalar_pair(const SobolevOperator& op, const FrenetData& frenet, std::span<const double> f,
                   std::span<const double> g);

}  // namespace unred
