#include "unred/curve.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "unred/errors.hpp"
#include "unred/spectral.hpp"

namespace unred {
namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw LengthMismatch(std::string(what) + ": expected " + std::to_string(want) + " samples, got " +
                         std::to_string(got));
  }
}

void require_grid_size(std::size_t m, const char* what) {
  if (m < 8 || m % 2 != 0) {
    throw RegularityError(std::string(what) + ": sample count must be even and at least 8, got " +
                          std::to_string(m));
  }
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

}  // namespace

DiscreteCurve::DiscreteCurve(std::vector<Vec2> samples) : samples_(std::move(samples)) {
  require_grid_size(samples_.size(), "DiscreteCurve");
  const std::size_t n = samples_.size();
  for (const auto& p : samples_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw RegularityError("DiscreteCurve: non-finite sample");
  }
  const double perim = polygon_perimeter();
  const double floor = kRegularityFloor * perim / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double seg = norm(samples_[(j + 1) % n] - samples_[j]);
    if (!(seg > floor)) {
      throw RegularityError("DiscreteCurve: collapsed segment at sample " + std::to_string(j));
    }
  }
  if (!(signed_area() > 0.0)) throw RegularityError("DiscreteCurve: curve is not positively oriented");
}

double DiscreteCurve::theta(std::size_t j) const noexcept {
  return kTwoPi * static_cast<double>(j) / static_cast<double>(samples_.size());
}

std::vector<double> DiscreteCurve::xs() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [](const Vec2& p) { return p.x; });
  return out;
}

std::vector<double> DiscreteCurve::ys() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [](const Vec2& p) { return p.y; });
  return out;
}

double DiscreteCurve::signed_area() const noexcept {
  const std::size_t n = samples_.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += cross(samples_[j], samples_[(j + 1) % n]);
  return 0.5 * acc;
}

double DiscreteCurve::polygon_perimeter() const noexcept {
  const std::size_t n = samples_.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += norm(samples_[(j + 1) % n] - samples_[j]);
  return acc;
}

DiscreteCurve sample_curve(std::size_t n, const std::function<Vec2(double)>& c) {
  std::vector<Vec2> pts(n);
  for (std::size_t j = 0; j < n; ++j) pts[j] = c(kTwoPi * static_cast<double>(j) / static_cast<double>(n));
  return DiscreteCurve(std::move(pts));
}

namespace shapes {

DiscreteCurve circle(std::size_t n, double radius, Vec2 center) {
  return sample_curve(n, [=](double t) { return Vec2{center.x + radius * std::cos(t), center.y + radius * std::sin(t)}; });
}

DiscreteCurve ellipse(std::size_t n, double a, double b) {
  return sample_curve(n, [=](double t) { return Vec2{a * std::cos(t), b * std::sin(t)}; });
}

DiscreteCurve rounded_square(std::size_t n, double bump) {
  return sample_curve(n, [=](double t) {
    const double r = 1.0 + bump * std::cos(4.0 * t);
    return Vec2{r * std::cos(t), r * std::sin(t)};
  });
}

}  // namespace shapes

std::vector<double> periodic_derivative(std::span<const double> f, DerivBackend backend, int order) {
  if (backend == DerivBackend::spectral) return spectral::derivative(f, order);

  const std::size_t n = f.size();
  const double h = kTwoPi / static_cast<double>(n);
  std::vector<double> out(n);
  if (order == 1) {
    for (std::size_t j = 0; j < n; ++j) out[j] = (f[(j + 1) % n] - f[(j + n - 1) % n]) / (2.0 * h);
  } else if (order == 2) {
    for (std::size_t j = 0; j < n; ++j) out[j] = (f[(j + 1) % n] - 2.0 * f[j] + f[(j + n - 1) % n]) / (h * h);
  } else {
    throw std::invalid_argument("periodic_derivative: central differences support orders 1 and 2");
  }
  return out;
}

FrenetData frenet(const DiscreteCurve& curve, DerivBackend backend) {
  const std::size_t n = curve.size();
  const auto x = curve.xs();
  const auto y = curve.ys();
  const auto xp = periodic_derivative(x, backend, 1);
  const auto yp = periodic_derivative(y, backend, 1);
  const auto xpp = periodic_derivative(x, backend, 2);
  const auto ypp = periodic_derivative(y, backend, 2);

  FrenetData f;
  f.backend = backend;
  f.tangent.resize(n);
  f.normal.resize(n);
  f.curvature.resize(n);
  f.speed.resize(n);

  double mean_speed = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    f.speed[j] = std::hypot(xp[j], yp[j]);
    mean_speed += f.speed[j];
  }
  mean_speed /= static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = f.speed[j];
    if (!(s > kRegularityFloor * mean_speed)) {
      throw RegularityError("frenet: speed vanishes at sample " + std::to_string(j));
    }
    f.tangent[j] = {xp[j] / s, yp[j] / s};
    f.normal[j] = quarter_turn(f.tangent[j]);
    f.curvature[j] = (xp[j] * ypp[j] - yp[j] * xpp[j]) / (s * s * s);
  }
  return f;
}

std::vector<double> arclength_derivative(const FrenetData& frenet, std::span<const double> f) {
  require_size(f.size(), frenet.size(), "arclength_derivative");
  auto d = periodic_derivative(f, frenet.backend, 1);
  for (std::size_t j = 0; j < d.size(); ++j) d[j] /= frenet.speed[j];
  return d;
}

VelocitySplit decompose_velocity(const FrenetData& frenet, std::span<const Vec2> u) {
  require_size(u.size(), frenet.size(), "decompose_velocity");
  VelocitySplit out;
  out.v.resize(u.size());
  out.h.resize(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    out.v[j] = dot(u[j], frenet.tangent[j]);
    out.h[j] = dot(u[j], frenet.normal[j]);
  }
  return out;
}

std::vector<Vec2> recompose_velocity(const FrenetData& frenet, std::span<const double> v, std::span<const double> h) {
  require_size(v.size(), frenet.size(), "recompose_velocity");
  require_size(h.size(), frenet.size(), "recompose_velocity");
  std::vector<Vec2> u(v.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = v[j] * frenet.tangent[j] + h[j] * frenet.normal[j];
  return u;
}

double total_turning(const FrenetData& frenet) {
  const double h = kTwoPi / static_cast<double>(frenet.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < frenet.size(); ++j) acc += frenet.curvature[j] * frenet.speed[j];
  return acc * h;
}

double perimeter(const FrenetData& frenet) {
  const double h = kTwoPi / static_cast<double>(frenet.size());
  double acc = 0.0;
  for (double s : frenet.speed) acc += s;
  return acc * h;
}

FrenetIdentityResidual frenet_identity_residual(const FrenetData& frenet) {
  const std::size_t n = frenet.size();
  std::vector<double> tx(n), ty(n), nx(n), ny(n);
  for (std::size_t j = 0; j < n; ++j) {
    tx[j] = frenet.tangent[j].x;
    ty[j] = frenet.tangent[j].y;
    nx[j] = frenet.normal[j].x;
    ny[j] = frenet.normal[j].y;
  }
  const auto dtx = arclength_derivative(frenet, tx);
  const auto dty = arclength_derivative(frenet, ty);
  const auto dnx = arclength_derivative(frenet, nx);
  const auto dny = arclength_derivative(frenet, ny);
  FrenetIdentityResidual r;
  for (std::size_t j = 0; j < n; ++j) {
    const double k = frenet.curvature[j];
    r.tangent = std::max(r.tangent, norm(Vec2{dtx[j], dty[j]} - k * frenet.normal[j]));
    r.normal = std::max(r.normal, norm(Vec2{dnx[j], dny[j]} + k * frenet.tangent[j]));
  }
  return r;
}

namespace {

// Arc length at the grid nodes, with the total length appended. Uses
// s(θ_j) = mean·θ_j + g(θ_j) − g(0), where g is the zero-mean antiderivative
// of the speed. The Nyquist sine vanishes on the grid.
std::vector<double> arclength_grid(const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  const auto f = frenet(curve, DerivBackend::spectral);
  auto c = spectral::forward(f.speed);
  const double mean = c[0].real() / static_cast<double>(n);
  c[0] = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) c[k] /= spectral::Complex(0.0, static_cast<double>(k));
  if (n % 2 == 0) c[n / 2] = 0.0;
  const auto g = spectral::inverse(c, n);
  std::vector<double> s_grid(n + 1);
  for (std::size_t j = 0; j < n; ++j) s_grid[j] = mean * kTwoPi * static_cast<double>(j) / static_cast<double>(n) + g[j] - g[0];
  s_grid[n] = mean * kTwoPi;
  return s_grid;
}

}  // namespace

std::vector<double> arclength_positions(const DiscreteCurve& curve) {
  auto s = arclength_grid(curve);
  const double scale = kTwoPi / s.back();
  s.pop_back();
  for (double& x : s) x *= scale;
  return s;
}

std::vector<double> arclength_parameters(const DiscreteCurve& curve, std::size_t m) {
  require_grid_size(m, "arclength_parameters");
  const std::size_t n = curve.size();
  const auto f = frenet(curve, DerivBackend::spectral);
  const spectral::TrigInterpolant speed(f.speed);
  const auto s_grid = arclength_grid(curve);
  const double length = s_grid[n];

  std::vector<double> out(m);
  const double h = kTwoPi / static_cast<double>(n);
  std::size_t bracket = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double target = length * static_cast<double>(i) / static_cast<double>(m);
    while (bracket + 1 < n && s_grid[bracket + 1] <= target) ++bracket;
    double lo = h * static_cast<double>(bracket);
    double hi = h * static_cast<double>(bracket + 1);
    const double s_lo = s_grid[bracket];
    const double s_hi = s_grid[bracket + 1];
    double theta = lo + (target - s_lo) / (s_hi - s_lo) * h;
    // Safeguarded Newton on the monotone arc-length function.
    for (int it = 0; it < 50; ++it) {
      const double r = speed.antiderivative(theta) - target;
      if (r > 0.0) {
        hi = theta;
      } else {
        lo = theta;
      }
      double next = theta - r / speed(theta);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - theta);
      theta = next;
      if (step < 1e-15 * kTwoPi) break;
    }
    out[i] = theta;
  }
  return out;
}

std::vector<Vec2> evaluate_curve(const DiscreteCurve& curve, std::span<const double> thetas) {
  const spectral::TrigInterpolant x(curve.xs());
  const spectral::TrigInterpolant y(curve.ys());
  std::vector<Vec2> out(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) out[i] = {x(thetas[i]), y(thetas[i])};
  return out;
}

DiscreteCurve resample_by_arclength(const DiscreteCurve& curve, std::size_t m) {
  const auto thetas = arclength_parameters(curve, m);
  return DiscreteCurve(evaluate_curve(curve, thetas));
}

DiscreteCurve reparametrize(const DiscreteCurve& curve, const std::function<double(double)>& phi) {
  const std::size_t n = curve.size();
  std::vector<double> thetas(n);
  for (std::size_t j = 0; j < n; ++j) thetas[j] = wrap_angle(phi(curve.theta(j)));
  return DiscreteCurve(evaluate_curve(curve, thetas));
}

namespace {

// Mean squared distance between uniform arc-length representatives, with the
// base point of `b` moved by `shift` parameter units.
class AlignedDistance {
 public:
  AlignedDistance(const DiscreteCurve& a, const DiscreteCurve& b)
      : m_(a.size()), ax_(a.xs()), ay_(a.ys()), bx_(spectral::forward(b.xs())), by_(spectral::forward(b.ys())) {}

  double mean_square(double shift) const {
    const auto bx = spectral::shifted(bx_, m_, shift);
    const auto by = spectral::shifted(by_, m_, shift);
    double acc = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      const double dx = ax_[j] - bx[j];
      const double dy = ay_[j] - by[j];
      acc += dx * dx + dy * dy;
    }
    return acc / static_cast<double>(m_);
  }

  // Best integer shift s maximizing Σ_j a_j · b_{j+s}, by FFT correlation.
  std::size_t best_integer_shift() const {
    const auto ax = spectral::forward(ax_);
    const auto ay = spectral::forward(ay_);
    std::vector<spectral::Complex> prod(ax.size());
    for (std::size_t k = 0; k < ax.size(); ++k) prod[k] = std::conj(ax[k]) * bx_[k] + std::conj(ay[k]) * by_[k];
    const auto corr = spectral::inverse(prod, m_);
    return static_cast<std::size_t>(std::distance(corr.begin(), std::max_element(corr.begin(), corr.end())));
  }

  double direct_mean_square(const DiscreteCurve& b, std::size_t s) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      const Vec2 d = Vec2{ax_[j], ay_[j]} - b[(j + s) % m_];
      acc += dot(d, d);
    }
    return acc / static_cast<double>(m_);
  }

 private:
  std::size_t m_;
  std::vector<double> ax_, ay_;
  std::vector<spectral::Complex> bx_, by_;
};

double one_sided_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  const AlignedDistance d(a, b);
  const std::size_t m = a.size();
  const double h = kTwoPi / static_cast<double>(m);
  const std::size_t s = d.best_integer_shift();
  double best = d.direct_mean_square(b, s);
  const double centre = h * static_cast<double>(s);
  auto objective = [&](double delta) { return d.mean_square(centre + delta * h); };
  const auto [delta, value] = boost::math::tools::brent_find_minima(objective, -1.0, 1.0, 40);
  (void)delta;
  best = std::min(best, value);
  return std::sqrt(std::max(best, 0.0));
}

}  // namespace

double shape_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  const std::size_t m = std::max(a.size(), b.size());
  const auto ra = resample_by_arclength(a, m);
  const auto rb = resample_by_arclength(b, m);
  return std::min(one_sided_distance(ra, rb), one_sided_distance(rb, ra));
}

}  // namespace unred
