#pragma once

// Quaternions w + x i + y j + z k. Unit quaternions represent points of S³
// and elements of SU(2).

#include <cmath>
#include <complex>

#include "unred/vec.hpp"

namespace unred {

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion& operator+=(const Quaternion& o) noexcept {
    w += o.w;
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) noexcept {
    w -= o.w;
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) noexcept {
    w *= s;
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  /// Complex pair (z₁, z₂) with q = z₁ + j z₂. Right multiplication by
  /// e^{iφ} then scales both entries by e^{iφ}.
  std::complex<double> z1() const noexcept { return {w, x}; }
  std::complex<double> z2() const noexcept { return {y, -z}; }
  static Quaternion from_complex(std::complex<double> z1, std::complex<double> z2) noexcept {
    return {z1.real(), z1.imag(), z2.real(), -z2.imag()};
  }

  static constexpr Quaternion pure(const Vec3& v) noexcept { return {0.0, v.x, v.y, v.z}; }
  constexpr Vec3 imaginary() const noexcept { return {x, y, z}; }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// Unit quaternions share the representation; functions that require unit
/// norm check it on entry.
using UnitQuaternion = Quaternion;

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) noexcept { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) noexcept { return a -= b; }
constexpr Quaternion operator*(double s, Quaternion a) noexcept { return a *= s; }
constexpr Quaternion operator*(Quaternion a, double s) noexcept { return a *= s; }

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion conj(const Quaternion& q) noexcept { return {q.w, -q.x, -q.y, -q.z}; }
constexpr double dot(const Quaternion& a, const Quaternion& b) noexcept {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Quaternion& q) noexcept { return std::sqrt(dot(q, q)); }
inline Quaternion normalized(const Quaternion& q) noexcept { return q * (1.0 / norm(q)); }

/// exp of the pure quaternion with imaginary part v.
inline Quaternion exp_pure(const Vec3& v) noexcept {
  const double a = norm(v);
  if (a == 0.0) return {};
  const double s = std::sin(a) / a;
  return {std::cos(a), s * v.x, s * v.y, s * v.z};
}

}  // namespace unred
