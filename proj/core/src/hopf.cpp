#include "unred/hopf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "unred/errors.hpp"
#include "unred/spectral.hpp"

namespace unred {
namespace {

constexpr double kNormTol = 1e-8;
constexpr double kPathNormTol = 1e-12;
constexpr double kClosureTol = 1e-10;
constexpr double kBaseTol = 1e-8;
constexpr double kDriftTol = 1e-6;

void require_unit(const Quaternion& q, const char* where) {
  if (!(std::abs(norm(q) - 1.0) <= kNormTol)) {
    throw NormError(std::string(where) + ": quaternion is not of unit norm");
  }
}

// Rows of dπ at q, each of length 2|q|, orthogonal to each other and to V(q).
std::array<Quaternion, 3> projection_jacobian(const Quaternion& q) noexcept {
  return {Quaternion{2 * q.w, 2 * q.x, -2 * q.y, -2 * q.z}, Quaternion{2 * q.y, -2 * q.z, 2 * q.w, -2 * q.x},
          Quaternion{2 * q.z, 2 * q.y, 2 * q.x, 2 * q.w}};
}

// Horizontal vector at q projecting to rho_dot: Jᵀρ̇/4.
Quaternion horizontal(const Quaternion& q, const Vec3& rho_dot) noexcept {
  const auto rows = projection_jacobian(q);
  return 0.25 * (rho_dot.x * rows[0] + rho_dot.y * rows[1] + rho_dot.z * rows[2]);
}

Vec3 project_unchecked(const Quaternion& q) noexcept {
  const auto z1 = q.z1();
  const auto z2 = q.z2();
  const auto p = z1 * std::conj(z2);
  return {std::norm(z1) - std::norm(z2), 2.0 * p.real(), 2.0 * p.imag()};
}

// Samples at θ_m and θ_m + π/K for m < K, from the first K entries.
std::vector<double> refine(const std::vector<double>& closed) {
  return spectral::upsample(std::span<const double>(closed.data(), closed.size() - 1), 2);
}

}  // namespace

Vec3 hopf_project(const UnitQuaternion& q) {
  require_unit(q, "hopf_project");
  return project_unchecked(q);
}

Quaternion fibre_generator(const Quaternion& q) noexcept { return q * Quaternion{0.0, 1.0, 0.0, 0.0}; }

UnitQuaternion canonical_lift(const Vec3& p) {
  if (!(std::abs(norm(p) - 1.0) <= kNormTol)) throw NormError("canonical_lift: point is not on the unit sphere");
  using C = std::complex<double>;
  if (p.x >= 0.0) {
    const double a = std::sqrt(0.5 * (1.0 + p.x));
    return normalized(Quaternion::from_complex(C(a, 0.0), C(p.y, -p.z) / (2.0 * a)));
  }
  const double b = std::sqrt(0.5 * (1.0 - p.x));
  return normalized(Quaternion::from_complex(C(p.y, p.z) / (2.0 * b), C(b, 0.0)));
}

SpherePath::SpherePath(std::vector<Vec3> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 3) throw LengthMismatch("SpherePath: need at least two intervals");
  for (const auto& p : samples_) {
    if (!(std::abs(norm(p) - 1.0) <= kPathNormTol)) throw NormError("SpherePath: sample off the unit sphere");
  }
  if (!(norm(samples_.back() - samples_.front()) <= kClosureTol)) {
    throw PeriodicityError("SpherePath: path does not close");
  }
}

SpherePath SpherePath::great_circle(std::size_t k, const Vec3& a, const Vec3& b) {
  return sample(k, [&](double t) { return std::cos(t) * a + std::sin(t) * b; });
}

SpherePath SpherePath::constant(std::size_t k, const Vec3& p) {
  return SpherePath(std::vector<Vec3>(k + 1, p));
}

SpherePath SpherePath::sample(std::size_t k, const std::function<Vec3(double)>& rho) {
  std::vector<Vec3> s(k + 1);
  for (std::size_t m = 0; m < k; ++m) {
    const Vec3 p = rho(kTwoPi * static_cast<double>(m) / static_cast<double>(k));
    s[m] = p * (1.0 / norm(p));
  }
  s[k] = s[0];
  return SpherePath(std::move(s));
}

VerticalProfile::VerticalProfile(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 3) throw LengthMismatch("VerticalProfile: need at least two intervals");
  if (!(std::abs(values_.back() - values_.front()) <= kClosureTol)) {
    throw PeriodicityError("VerticalProfile: profile is not periodic");
  }
}

double VerticalProfile::integral() const noexcept {
  double acc = 0.0;
  for (std::size_t m = 0; m + 1 < values_.size(); ++m) acc += values_[m];
  return acc * kTwoPi / static_cast<double>(intervals());
}

VerticalProfile VerticalProfile::constant(std::size_t k, double c) {
  return VerticalProfile(std::vector<double>(k + 1, c));
}

VerticalProfile VerticalProfile::sample(std::size_t k, const std::function<double(double)>& f) {
  std::vector<double> v(k + 1);
  for (std::size_t m = 0; m < k; ++m) v[m] = f(kTwoPi * static_cast<double>(m) / static_cast<double>(k));
  v[k] = v[0];
  return VerticalProfile(std::move(v));
}

VerticalProfile vertical_ode(const std::function<double(double)>& fv, double sigma0, std::size_t k) {
  if (k < 2) throw LengthMismatch("vertical_ode: need at least two intervals");
  std::vector<double> f(k);
  for (std::size_t m = 0; m < k; ++m) f[m] = fv(kTwoPi * static_cast<double>(m) / static_cast<double>(k));
  const spectral::TrigInterpolant interp(f);
  const double jump = interp.antiderivative(kTwoPi);
  if (!(std::abs(jump) <= 1e-8)) {
    throw PeriodicityError("vertical_ode: f^v has nonzero mean, no periodic solution exists");
  }
  std::vector<double> v(k + 1);
  for (std::size_t m = 0; m < k; ++m) {
    v[m] = sigma0 + interp.antiderivative(kTwoPi * static_cast<double>(m) / static_cast<double>(k));
  }
  v[k] = v[0];
  return VerticalProfile(std::move(v));
}

double fibre_phase(const UnitQuaternion& a, const UnitQuaternion& b) {
  const auto pairing = a.z1() * std::conj(b.z1()) + a.z2() * std::conj(b.z2());
  double phi = std::arg(pairing);
  if (phi <= -kPi) phi += kTwoPi;
  return phi;
}

LiftResult horizontal_lift(const SpherePath& rho, const VerticalProfile& sigma, const UnitQuaternion& s0) {
  const std::size_t k = rho.intervals();
  if (sigma.intervals() != k) throw LengthMismatch("horizontal_lift: path and profile sample counts differ");
  require_unit(s0, "horizontal_lift");
  const auto& pts = rho.samples();
  if (!(norm(project_unchecked(s0) - pts[0]) <= kBaseTol)) {
    throw ProjectionDrift("horizontal_lift: s0 does not lie over rho(0)");
  }

  // Velocities and ς on the doubled grid: entry 2m is θ_m, entry 2m+1 the midpoint.
  std::array<std::vector<double>, 3> vel;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> comp(k + 1);
    for (std::size_t m = 0; m <= k; ++m) comp[m] = c == 0 ? pts[m].x : c == 1 ? pts[m].y : pts[m].z;
    vel[c] = spectral::derivative(refine(comp), 1);
  }
  const auto sig = refine(sigma.values());
  const std::size_t fine = 2 * k;
  auto at = [&](std::size_t idx) {
    idx %= fine;
    return std::pair{Vec3{vel[0][idx], vel[1][idx], vel[2][idx]}, sig[idx]};
  };
  auto rhs = [](const Quaternion& q, const std::pair<Vec3, double>& data) {
    return horizontal(q, data.first) - data.second * fibre_generator(q);
  };

  LiftResult out;
  out.path.resize(k + 1);
  out.path[0] = s0;
  const double h = kTwoPi / static_cast<double>(k);
  Quaternion s = s0;
  for (std::size_t m = 0; m < k; ++m) {
    const auto d0 = at(2 * m);
    const auto dh = at(2 * m + 1);
    const auto d1 = at(2 * m + 2);
    const Quaternion k1 = rhs(s, d0);
    const Quaternion k2 = rhs(s + 0.5 * h * k1, dh);
    const Quaternion k3 = rhs(s + 0.5 * h * k2, dh);
    const Quaternion k4 = rhs(s + h * k3, d1);
    s = normalized(s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    out.path[m + 1] = s;
  }

  for (std::size_t m = 0; m <= k; ++m) {
    out.max_projection_error = std::max(out.max_projection_error, norm(project_unchecked(out.path[m]) - pts[m]));
  }
  if (!(out.max_projection_error <= kDriftTol)) {
    throw ProjectionDrift("horizontal_lift: lifted path drifted off rho by " +
                          std::to_string(out.max_projection_error));
  }
  out.holonomy.phase = fibre_phase(out.path.front(), out.path.back());
  out.holonomy.closure_error = norm(out.path.back() - out.path.front());
  return out;
}

HolonomyResult holonomy(const SpherePath& rho, const VerticalProfile& sigma) {
  return horizontal_lift(rho, sigma, canonical_lift(rho.samples().front())).holonomy;
}

}  // namespace unred
