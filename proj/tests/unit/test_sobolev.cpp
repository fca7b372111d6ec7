#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "unred/errors.hpp"
#include "unred/sobolev.hpp"

using namespace unred;
using unred::test::max_abs;
using unred::test::max_abs_diff;
using unred::test::sampled;

namespace {

std::vector<double> random_smooth(std::size_t n, std::mt19937& rng, int modes = 6) {
  std::normal_distribution<double> g;
  std::vector<double> a(modes), b(modes);
  for (int k = 0; k < modes; ++k) {
    a[k] = g(rng) / (1.0 + k);
    b[k] = g(rng) / (1.0 + k);
  }
  const double c0 = g(rng);
  return sampled(n, [&](double t) {
    double s = c0;
    for (int k = 0; k < modes; ++k) s += a[k] * std::cos((k + 1) * t) + b[k] * std::sin((k + 1) * t);
    return s;
  });
}

std::vector<double> random_rough(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<double> f(n);
  for (auto& v : f) v = g(rng);
  return f;
}

}  // namespace

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(SobolevOperator(-0.1, 16), std::invalid_argument);
  CHECK_THROWS_AS(SobolevOperator(0.1, 0), std::invalid_argument);
  const SobolevOperator op(0.2, 16);
  CHECK_THROWS_AS(op.apply(std::vector<double>(15, 1.0)), LengthMismatch);
  CHECK_THROWS_AS(op.solve(std::vector<double>(17, 1.0)), LengthMismatch);
}

TEST_CASE("apply examples") {
  std::mt19937 rng(7);
  const auto f = random_rough(64, rng);
  for (auto backend : {SobolevBackend::spectral, SobolevBackend::tridiagonal}) {
    CHECK(max_abs_diff(SobolevOperator(0.0, 64, backend).apply(f), f) < 1e-14);
    const std::vector<double> c(64, -2.5);
    CHECK(max_abs_diff(SobolevOperator(0.7, 64, backend).apply(c), c) < 1e-13);
  }

  const std::size_t n = 128;
  for (double a : {0.1, 0.5, 1.0}) {
    const SobolevOperator op(a, n);
    for (std::size_t k = 1; k <= n / 4; ++k) {
      const auto s = sampled(n, [k](double t) { return std::sin(static_cast<double>(k) * t); });
      const double lambda = 1.0 + a * a * static_cast<double>(k * k);
      auto expect = s;
      for (auto& v : expect) v *= lambda;
      CHECK(max_abs_diff(op.apply(s), expect) / lambda < 1e-10);
    }
  }
}

TEST_CASE("solve examples") {
  const std::size_t n = 64;
  const auto sin_th = sampled(n, [](double t) { return std::sin(t); });
  auto two_sin = sin_th;
  for (auto& v : two_sin) v *= 2.0;
  CHECK(max_abs_diff(SobolevOperator(1.0, n).solve(two_sin), sin_th) < 1e-14);

  const std::vector<double> three(n, 3.0);
  for (auto backend : {SobolevBackend::spectral, SobolevBackend::tridiagonal}) {
    CHECK(max_abs_diff(SobolevOperator(0.5, n, backend).solve(three), three) < 1e-13);
  }

  std::mt19937 rng(11);
  for (auto backend : {SobolevBackend::spectral, SobolevBackend::tridiagonal}) {
    for (double a : {0.0, 0.1, 2.0}) {
      const SobolevOperator op(a, n, backend);
      const auto f0 = random_rough(n, rng);
      CHECK(max_abs_diff(op.solve(op.apply(f0)), f0) / max_abs(f0) < 1e-10);
      CHECK(max_abs_diff(op.apply(op.solve(f0)), f0) / max_abs(f0) < 1e-10);
    }
  }
}

TEST_CASE("metric pairing examples") {
  const std::size_t n = 128;
  const auto fr = frenet(shapes::circle(n));
  CHECK(metric_pair(SobolevOperator(0.0, n), fr, fr.normal, fr.normal) == doctest::Approx(kTwoPi).epsilon(1e-10));
  CHECK(metric_pair(SobolevOperator(1.0, n), fr, fr.normal, fr.normal) ==
        doctest::Approx(2.0 * kTwoPi).epsilon(1e-10));
  const std::vector<Vec2> zero(n);
  CHECK(metric_pair(SobolevOperator(0.3, n), fr, zero, fr.tangent) == 0.0);
  CHECK_THROWS_AS(metric_pair(SobolevOperator(0.3, n), fr, zero, std::vector<Vec2>(n - 2)), LengthMismatch);
}

TEST_CASE("metric pairing is symmetric and positive on circles") {
  std::mt19937 rng(3);
  for (std::size_t n : {32, 128}) {
    for (double radius : {0.5, 2.0}) {
      const auto fr = frenet(shapes::circle(n, radius, {0.4, 1.0}));
      for (double a : {0.0, 0.1, 1.0}) {
        const SobolevOperator op(a, n);
        for (int trial = 0; trial < 5; ++trial) {
          std::vector<Vec2> u(n), w(n);
          const auto ux = random_rough(n, rng), uy = random_rough(n, rng);
          const auto wx = random_rough(n, rng), wy = random_rough(n, rng);
          for (std::size_t j = 0; j < n; ++j) {
            u[j] = {ux[j], uy[j]};
            w[j] = {wx[j], wy[j]};
          }
          const double uw = metric_pair(op, fr, u, w);
          const double wu = metric_pair(op, fr, w, u);
          CHECK(std::abs(uw - wu) <= 1e-10 * std::max(1.0, std::abs(uw)));
          CHECK(metric_pair(op, fr, u, u) > 0.0);
        }
      }
    }
  }
}

TEST_CASE("difference and spectral backends agree at second order") {
  std::mt19937 rng(5);
  const auto probe = [&](std::size_t n) {
    std::mt19937 local(5);
    const auto f = random_smooth(n, local);
    const SobolevOperator s(0.3, n, SobolevBackend::spectral);
    const SobolevOperator d(0.3, n, SobolevBackend::tridiagonal);
    return max_abs_diff(s.apply(f), d.apply(f));
  };
  const double e64 = probe(64), e128 = probe(128), e256 = probe(256);
  CHECK(std::log2(e64 / e128) > 1.9);
  CHECK(std::log2(e128 / e256) > 1.9);
}
