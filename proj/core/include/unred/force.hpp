#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace unred {

/// Vertical (tangential) force F^v from a fixed registry. The profile is
/// uniform over the (x, t) domain and depends only on θ.
struct ForceProfile {
  enum class Kind { zero, constant, sinusoidal };

  Kind kind = Kind::zero;
  double amplitude = 0.0;
  int frequency = 0;  // θ-wavenumber, sinusoidal only

  static ForceProfile zero() { return {}; }
  static ForceProfile constant(double a) { return {Kind::constant, a, 0}; }
  static ForceProfile sinusoidal(double a, int k) { return {Kind::sinusoidal, a, k}; }

  /// Values on the uniform θ grid of size n.
  std::vector<double> evaluate(std::size_t n) const;
};

std::string to_string(ForceProfile::Kind kind);

}  // namespace unred
