#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "unred/vec.hpp"

namespace unred::test {

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

template <class F>
std::vector<double> sampled(std::size_t n, F&& f) {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = f(kTwoPi * static_cast<double>(j) / static_cast<double>(n));
  return out;
}

/// Phase difference reduced to (−π, π].
inline double wrapped(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace unred::test
