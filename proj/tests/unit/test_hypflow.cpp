#include <doctest.h>

#include <array>
#include <cmath>

#include "helpers.hpp"
#include "unred/errors.hpp"
#include "unred/hypflow.hpp"

using namespace unred;
using unred::test::max_abs;

namespace {

struct OracleCase {
  double r0, h0, t, radius, h;
};

// Circle reduction Ṙ = −h, ḣ = (1 − ½h²)/R solved with scipy solve_ivp
// (DOP853, rtol 1e-13). The solutions are exactly h linear and R quadratic in t.
constexpr std::array<OracleCase, 4> kCircleOracle{{
    {1.0, 0.0, 0.5, 0.8749999999999996, 0.5000000000000001},
    {1.0, 0.0, 0.1, 0.995, 0.1},
    {2.0, 0.0, 0.3, 1.9775000000000003, 0.15},
    {1.0, 0.5, 0.4, 0.7300000000000002, 0.8499999999999999},
}};

FlowState circle_state(std::size_t n, double radius, double h0) {
  return {shapes::circle(n, radius), std::vector<double>(n, h0), std::vector<double>(n, 0.0), 0.0};
}

double mean_radius(const DiscreteCurve& c) {
  double s = 0.0;
  for (const auto& p : c.samples()) s += norm(p);
  return s / static_cast<double>(c.size());
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("flow right-hand side examples") {
  const std::size_t n = 64;
  const auto still = flow_rhs(circle_state(n, 1.0, 0.0), ForceProfile::zero());
  for (std::size_t j = 0; j < n; ++j) {
    CHECK(std::abs(still.dh[j] - 1.0) < 1e-12);
    CHECK(norm(still.dc[j]) == 0.0);
    CHECK(still.dv[j] == 0.0);
  }

  const auto moving = flow_rhs(circle_state(n, 2.5, 0.7), ForceProfile::zero());
  for (double v : moving.dh) CHECK(std::abs(v - (1.0 - 0.5 * 0.49) / 2.5) < 1e-12);

  FlowState sliding = circle_state(n, 1.0, 0.0);
  sliding.v = test::sampled(n, [](double t) { return std::sin(t); });
  const auto force = ForceProfile::sinusoidal(0.3, 2);
  const auto r = flow_rhs(sliding, force);
  const auto fv = force.evaluate(n);
  for (std::size_t j = 0; j < n; ++j) {
    CHECK(std::abs(r.dh[j] - 1.0) < 1e-12);
    CHECK(r.dv[j] == fv[j]);
  }

  const auto ellipse = shapes::ellipse(128, 2.0, 1.0);
  const FlowState e{ellipse, std::vector<double>(128, 0.0), std::vector<double>(128, 0.0), 0.0};
  const auto re = flow_rhs(e, ForceProfile::zero());
  for (std::size_t j = 0; j < 128; ++j) {
    const double s = std::sin(ellipse.theta(j)), c = std::cos(ellipse.theta(j));
    CHECK(std::abs(re.dh[j] - 2.0 / std::pow(4.0 * s * s + c * c, 1.5)) < 1e-9);
  }

  FlowState bad = circle_state(16, 1.0, 0.0);
  bad.h.pop_back();
  CHECK_THROWS_AS(flow_rhs(bad, ForceProfile::zero()), LengthMismatch);
}

TEST_CASE("circle reduction oracle") {
  for (const auto& c : kCircleOracle) {
    const auto s = circle_reduction_oracle(c.r0, c.h0, c.t);
    CHECK(std::abs(s.radius - c.radius) < 1e-10);
    CHECK(std::abs(s.h - c.h) < 1e-10);
  }
  const auto eq = circle_reduction_oracle(1.0, std::sqrt(2.0), 0.1);
  CHECK(std::abs(eq.h - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(eq.radius - (1.0 - 0.1 * std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(circle_reduction_oracle(1.0, 0.0, 1e-3).h - 1e-3) < 1e-8);
  CHECK(std::abs(circle_reduction_oracle(2.0, 0.0, 1e-3).h - 0.5e-3) < 1e-8);
  CHECK_THROWS_AS(circle_reduction_oracle(1.0, 2.0, 3.0), SingularityStop);
}

TEST_CASE("circle flow matches the oracle and keeps v at zero") {
  for (const auto& c : kCircleOracle) {
    const auto traj = integrate(circle_state(64, c.r0, c.h0), ForceProfile::zero(), c.t, 1e-3, {.save_stride = 25});
    REQUIRE(traj.stop == StopReason::completed);
    const auto& last = traj.frames.back();
    CHECK(last.time == doctest::Approx(c.t).epsilon(1e-12));
    CHECK(std::abs(mean_radius(last.curve) - c.radius) < 1e-6);
    CHECK(std::abs(mean(last.h) - c.h) < 1e-6);
    for (const auto& f : traj.frames) CHECK(max_abs(f.v) == 0.0);
  }
}

TEST_CASE("v stays exactly zero on non-circular data without force") {
  const std::size_t n = 64;
  const FlowState s{shapes::rounded_square(n, 0.1), test::sampled(n, [](double t) { return 0.2 * std::cos(3 * t); }),
                    std::vector<double>(n, 0.0), 0.0};
  const auto traj = integrate(s, ForceProfile::zero(), 0.1, 1e-3);
  CHECK(traj.frames.size() == 101);
  for (const auto& f : traj.frames) CHECK(max_abs(f.v) == 0.0);
}

TEST_CASE("tangential velocity integrates the force exactly") {
  const std::size_t n = 32;
  const auto force = ForceProfile::sinusoidal(0.4, 3);
  const auto traj = integrate(circle_state(n, 1.0, 0.0), force, 0.2, 1e-2);
  const auto fv = force.evaluate(n);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(traj.frames.back().v[j] - 0.2 * fv[j]) < 1e-13);
}

TEST_CASE("circular data stays circular") {
  const auto traj = integrate(circle_state(128, 1.0, 0.3), ForceProfile::zero(), 0.5, 1e-3, {.save_stride = 10});
  for (const auto& f : traj.frames) {
    const auto fr = frenet(f.curve);
    const double k = mean(fr.curvature);
    double dev = 0.0;
    for (double v : fr.curvature) dev = std::max(dev, std::abs(v - k));
    CHECK(dev < 1e-8);
  }
}

TEST_CASE("time integration converges at fourth order") {
  const auto exact = circle_reduction_oracle(1.0, 0.5, 0.4);
  auto error = [&](double dt) {
    const auto traj = integrate(circle_state(32, 1.0, 0.5), ForceProfile::zero(), 0.4, dt, {.save_stride = 1000});
    const auto& last = traj.frames.back();
    return std::max(std::abs(mean_radius(last.curve) - exact.radius), std::abs(mean(last.h) - exact.h));
  };
  const double e1 = error(0.05), e2 = error(0.025), e3 = error(0.0125);
  CHECK(std::log2(e1 / e2) > 3.8);
  CHECK(std::log2(e2 / e3) > 3.8);
}

TEST_CASE("arc-length resampling does not change the shape trajectory") {
  const std::size_t n = 128;
  const FlowState s{shapes::ellipse(n, 1.5, 1.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
  const auto plain = integrate(s, ForceProfile::zero(), 0.2, 1e-3, {.save_stride = 1000});
  const auto resampled = integrate(s, ForceProfile::zero(), 0.2, 1e-3, {.resample_every = 20, .save_stride = 1000});
  CHECK(shape_distance(plain.frames.back().curve, resampled.frames.back().curve) < 1e-6);
}

TEST_CASE("collapse stops early with the last valid state") {
  const auto traj = integrate(circle_state(32, 1.0, 2.0), ForceProfile::zero(), 3.0, 1e-3, {.save_stride = 100});
  CHECK(traj.stop != StopReason::completed);
  CHECK(traj.last_valid_time < 3.0);
  CHECK(traj.last_valid_time > 0.4);
  CHECK(traj.frames.back().time == doctest::Approx(traj.last_valid_time));
}
