#include "unred/force.hpp"

#include <cmath>

#include "unred/vec.hpp"

namespace unred {

std::vector<double> ForceProfile::evaluate(std::size_t n) const {
  std::vector<double> out(n, 0.0);
  switch (kind) {
    case Kind::zero:
      break;
    case Kind::constant:
      for (auto& v : out) v = amplitude;
      break;
    case Kind::sinusoidal:
      for (std::size_t j = 0; j < n; ++j) {
        out[j] = amplitude * std::sin(static_cast<double>(frequency) * kTwoPi * static_cast<double>(j) /
                                      static_cast<double>(n));
      }
      break;
  }
  return out;
}

std::string to_string(ForceProfile::Kind kind) {
  switch (kind) {
    case ForceProfile::Kind::zero:
      return "zero";
    case ForceProfile::Kind::constant:
      return "constant";
    case ForceProfile::Kind::sinusoidal:
      return "sinusoidal";
  }
  return "unknown";
}

}  // namespace unred
