#include "unred/sobolev.hpp"

#include <stdexcept>
#include <string>

#include "unred/errors.hpp"
#include "unred/spectral.hpp"

namespace unred {

SobolevOperator::SobolevOperator(double length_scale, std::size_t n, SobolevBackend backend)
    : a_(length_scale), n_(n), backend_(backend) {
  if (!(length_scale >= 0.0)) throw std::invalid_argument("SobolevOperator: A must be >= 0");
  if (n == 0) throw std::invalid_argument("SobolevOperator: empty grid");
}

void SobolevOperator::check(std::size_t got) const {
  if (got != n_) {
    throw LengthMismatch("SobolevOperator: expected " + std::to_string(n_) + " samples, got " + std::to_string(got));
  }
}

std::vector<double> SobolevOperator::apply(std::span<const double> f) const {
  check(f.size());
  const double a2 = a_ * a_;
  if (a2 == 0.0) return {f.begin(), f.end()};
  if (backend_ == SobolevBackend::spectral) {
    return spectral::apply_symbol(f, [a2](double k) { return 1.0 + a2 * k * k; });
  }
  const double h = kTwoPi / static_cast<double>(n_);
  const double c = a2 / (h * h);
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    out[j] = f[j] - c * (f[(j + 1) % n_] - 2.0 * f[j] + f[(j + n_ - 1) % n_]);
  }
  return out;
}

std::vector<double> SobolevOperator::solve(std::span<const double> g) const {
  check(g.size());
  const double a2 = a_ * a_;
  if (a2 == 0.0) return {g.begin(), g.end()};
  if (backend_ == SobolevBackend::spectral) {
    return spectral::apply_symbol(g, [a2](double k) { return 1.0 / (1.0 + a2 * k * k); });
  }

  // Cyclic tridiagonal system (1 + 2c) f_j − c f_{j±1} = g_j, solved by the
  // Sherman–Morrison correction of the Thomas algorithm.
  const double h = kTwoPi / static_cast<double>(n_);
  const double c = a2 / (h * h);
  const double diag = 1.0 + 2.0 * c;
  const double off = -c;
  const std::size_t n = n_;
  const double gamma = -diag;

  std::vector<double> b(n, diag);
  b[0] = diag - gamma;
  b[n - 1] = diag - off * off / gamma;

  auto thomas = [&](std::vector<double> rhs) {
    std::vector<double> cp(n), dp(n);
    cp[0] = off / b[0];
    dp[0] = rhs[0] / b[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = b[i] - off * cp[i - 1];
      cp[i] = off / m;
      dp[i] = (rhs[i] - off * dp[i - 1]) / m;
    }
    std::vector<double> x(n);
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
  };

  auto y = thomas(std::vector<double>(g.begin(), g.end()));
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = off;
  auto z = thomas(u);
  const double factor = (y[0] + off * y[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) y[i] -= factor * z[i];
  return y;
}

std::vector<Vec2> SobolevOperator::apply(std::span<const Vec2> u) const {
  check(u.size());
  std::vector<double> x(u.size()), y(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    x[j] = u[j].x;
    y[j] = u[j].y;
  }
  const auto px = apply(std::span<const double>(x));
  const auto py = apply(std::span<const double>(y));
  std::vector<Vec2> out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = {px[j], py[j]};
  return out;
}

double metric_pair(const SobolevOperator& op, const FrenetData& frenet, std::span<const Vec2> u,
                   std::span<const Vec2> w) {
  if (u.size() != frenet.size() || w.size() != frenet.size()) {
    throw LengthMismatch("metric_pair: field length does not match the curve");
  }
  const auto pw = op.apply(w);
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += dot(u[j], pw[j]) * frenet.speed[j];
  return acc * kTwoPi / static_cast<double>(u.size());
}

double scalar_pair(const SobolevOperator& op, const FrenetData& frenet, std::span<const double> f,
                   std::span<const double> g) {
  if (f.size() != frenet.size() || g.size() != frenet.size()) {
    throw LengthMismatch("scalar_pair: field length does not match the curve");
  }
  const auto pg = op.apply(g);
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * pg[j] * frenet.speed[j];
  return acc * kTwoPi / static_cast<double>(f.size());
}

}  // namespace unred
