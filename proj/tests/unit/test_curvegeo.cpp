#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "unred/curve.hpp"
#include "unred/curve_io.hpp"
#include "unred/errors.hpp"

using namespace unred;
using unred::test::max_abs;
using unred::test::sampled;

namespace {

// Dense trapezoidal perimeter of r(θ) = 1 + 0.05 cos 4θ, computed offline with
// 2¹⁶ samples of the analytic speed sqrt(r² + r'²).
constexpr double kRoundedSquarePerimeter = 6.345591781726428;

DiscreteCurve reparametrized_circle(std::size_t n, double eps) {
  return sample_curve(n, [eps](double th) {
    const double s = th + eps * std::sin(th);
    return Vec2{std::cos(s), std::sin(s)};
  });
}

}  // namespace

TEST_CASE("curve construction enforces size, regularity and orientation") {
  CHECK_THROWS_AS(shapes::circle(6), RegularityError);
  CHECK_THROWS_AS(shapes::circle(9), RegularityError);
  CHECK_NOTHROW(shapes::circle(8));

  std::vector<Vec2> cw;
  for (std::size_t j = 0; j < 16; ++j) {
    const double th = -kTwoPi * static_cast<double>(j) / 16.0;
    cw.push_back({std::cos(th), std::sin(th)});
  }
  CHECK_THROWS_AS(DiscreteCurve{cw}, RegularityError);

  auto pts = shapes::circle(16).samples();
  std::vector<Vec2> collapsed(pts.begin(), pts.end());
  collapsed[3] = collapsed[2];
  CHECK_THROWS_AS(DiscreteCurve{collapsed}, RegularityError);
}

TEST_CASE("circle curvature and normal direction") {
  const auto unit = frenet(shapes::circle(256));
  for (std::size_t j = 0; j < unit.size(); ++j) CHECK(std::abs(unit.curvature[j] - 1.0) < 1e-10);

  const Vec2 centre{0.3, -0.2};
  const auto c2 = shapes::circle(64, 2.0, centre);
  const auto f2 = frenet(c2);
  for (std::size_t j = 0; j < f2.size(); ++j) {
    CHECK(std::abs(f2.curvature[j] - 0.5) < 1e-10);
    const Vec2 inward = (centre - c2[j]) * 0.5;
    CHECK(norm(f2.normal[j] - inward) < 1e-10);
    CHECK(std::abs(norm(f2.tangent[j]) - 1.0) < 1e-14);
    CHECK(norm(f2.normal[j] - quarter_turn(f2.tangent[j])) < 1e-15);
  }
}

TEST_CASE("ellipse curvature matches the closed form") {
  const auto e = shapes::ellipse(128, 2.0, 1.0);
  const auto f = frenet(e);
  CHECK(f.curvature[0] == doctest::Approx(2.0).epsilon(1e-10));
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double th = e.theta(j);
    const double s = std::sin(th), c = std::cos(th);
    const double exact = 2.0 / std::pow(4.0 * s * s + c * c, 1.5);
    CHECK(std::abs(f.curvature[j] - exact) < 1e-9);
  }
}

TEST_CASE("regularity error for a vanishing parametrization speed") {
  // θ ↦ θ − sin θ stalls at θ = 0.
  const auto stalled = sample_curve(64, [](double th) {
    const double s = th - 0.999999 * std::sin(th);
    return Vec2{std::cos(s), std::sin(s)};
  });
  CHECK_THROWS_AS(frenet(stalled), RegularityError);
}

TEST_CASE("arc-length derivative examples") {
  for (auto backend : {DerivBackend::spectral, DerivBackend::central_difference}) {
    const double tol = backend == DerivBackend::spectral ? 1e-12 : 2e-3;
    const auto unit = frenet(shapes::circle(128), backend);
    CHECK(max_abs(arclength_derivative(unit, std::vector<double>(128, 4.2))) < 1e-12);
    const auto sin_th = sampled(128, [](double t) { return std::sin(t); });
    const auto cos_th = sampled(128, [](double t) { return std::cos(t); });
    CHECK(test::max_abs_diff(arclength_derivative(unit, sin_th), cos_th) < tol);

    const auto big = frenet(shapes::circle(128, 2.0), backend);
    const auto half_cos = sampled(128, [](double t) { return 0.5 * std::cos(t); });
    CHECK(test::max_abs_diff(arclength_derivative(big, sin_th), half_cos) < tol);
  }
  const auto unit = frenet(shapes::circle(32));
  CHECK_THROWS_AS(arclength_derivative(unit, std::vector<double>(31, 0.0)), LengthMismatch);
}

TEST_CASE("velocity decomposition examples and round trip") {
  const auto f = frenet(shapes::ellipse(64, 1.5, 1.0));
  std::vector<Vec2> n = f.normal, t = f.tangent, mix(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) mix[j] = 3.0 * t[j] + 4.0 * n[j];

  const auto sn = decompose_velocity(f, n);
  const auto st = decompose_velocity(f, t);
  const auto sm = decompose_velocity(f, mix);
  for (std::size_t j = 0; j < f.size(); ++j) {
    CHECK(std::abs(sn.v[j]) < 1e-15);
    CHECK(std::abs(sn.h[j] - 1.0) < 1e-15);
    CHECK(std::abs(st.v[j] - 1.0) < 1e-15);
    CHECK(std::abs(st.h[j]) < 1e-15);
    CHECK(std::abs(sm.v[j] - 3.0) < 1e-14);
    CHECK(std::abs(sm.h[j] - 4.0) < 1e-14);
  }

  std::vector<Vec2> u(f.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = {std::sin(3.0 * j) - 0.2, std::cos(1.7 * j) * 5.0};
  const auto s = decompose_velocity(f, u);
  const auto back = recompose_velocity(f, s.v, s.h);
  for (std::size_t j = 0; j < u.size(); ++j) CHECK(norm(back[j] - u[j]) < 1e-14);

  CHECK_THROWS_AS(decompose_velocity(f, std::vector<Vec2>(10)), LengthMismatch);
}

TEST_CASE("arc-length resampling") {
  const auto circle = shapes::circle(64);
  const auto same = resample_by_arclength(circle, 64);
  for (std::size_t j = 0; j < 64; ++j) CHECK(norm(same[j] - circle[j]) < 1e-10);

  // Sample 0 of c∘φ is c(0), so the canonical representative is the uniform circle.
  const auto warped = reparametrized_circle(256, 0.3);
  const auto canon = resample_by_arclength(warped, 256);
  const auto uniform = shapes::circle(256);
  double err = 0.0;
  for (std::size_t j = 0; j < 256; ++j) err = std::max(err, norm(canon[j] - uniform[j]));
  CHECK(err < 1.0 / (256.0 * 256.0));

  const auto square = shapes::rounded_square(256);
  const auto dense = resample_by_arclength(square, 512);
  const double length = perimeter(frenet(dense));
  CHECK(std::abs(length - kRoundedSquarePerimeter) / kRoundedSquarePerimeter < 1e-6);
  CHECK(std::abs(perimeter(frenet(square)) - kRoundedSquarePerimeter) / kRoundedSquarePerimeter < 1e-10);
}

TEST_CASE("shape distance examples") {
  const auto e = shapes::ellipse(128, 1.5, 0.8);
  CHECK(shape_distance(e, e) < 1e-12);
  CHECK(shape_distance(shapes::circle(256), reparametrized_circle(256, 0.3)) < 1e-6);

  const double d = shape_distance(shapes::circle(128, 1.0), shapes::circle(128, 1.1));
  CHECK(std::abs(d - 0.1) < 1e-6);
  CHECK(shape_distance(shapes::circle(128, 1.1), shapes::circle(128, 1.0)) == doctest::Approx(d).epsilon(1e-12));

  CHECK(shape_distance(e, shapes::ellipse(128, 1.5, 0.9)) > 0.05);
}

TEST_CASE("shape distance is blind to smooth reparametrizations") {
  const auto square = shapes::rounded_square(256);
  const auto ellipse = shapes::ellipse(256, 2.0, 1.0);
  const std::vector<std::function<double(double)>> maps{
      [](double t) { return t + 0.3 * std::sin(t); },
      [](double t) { return t + 0.2 * std::sin(2.0 * t) + 0.5; },
      [](double t) { return t + 0.1 * std::cos(3.0 * t) - 1.3; },
  };
  for (const auto& phi : maps) {
    CHECK(shape_distance(square, reparametrize(square, phi)) < 1e-4);
    CHECK(shape_distance(ellipse, reparametrize(ellipse, phi)) < 1e-4);
  }
}

TEST_CASE("Frenet identities converge at second order for the difference backend") {
  const std::vector<std::function<DiscreteCurve(std::size_t)>> fixtures{
      [](std::size_t n) { return shapes::circle(n); },
      [](std::size_t n) { return shapes::ellipse(n, 2.0, 1.0); },
      [](std::size_t n) { return shapes::rounded_square(n); },
  };
  for (const auto& make : fixtures) {
    auto worst = [&](std::size_t n) {
      const auto r = frenet_identity_residual(frenet(make(n), DerivBackend::central_difference));
      return std::max(r.tangent, r.normal);
    };
    const double order = std::log2(worst(256) / worst(512));
    CHECK(order > 1.9);

    const double coarse = std::abs(total_turning(frenet(make(64), DerivBackend::central_difference)) - kTwoPi);
    const double fine = std::abs(total_turning(frenet(make(256), DerivBackend::central_difference)) - kTwoPi);
    CHECK(fine < coarse / 10.0);
    CHECK(std::abs(total_turning(frenet(make(256))) - kTwoPi) < 1e-10);

    const auto spectral = frenet_identity_residual(frenet(make(128)));
    CHECK(std::max(spectral.tangent, spectral.normal) < 1e-9);
  }
}

TEST_CASE("curve CSV round trip and grid validation") {
  const auto e = shapes::rounded_square(32, 0.1);
  std::stringstream ss;
  write_curve_csv(ss, e);
  const std::string text = ss.str();
  CHECK(text.rfind("theta,x,y\n", 0) == 0);

  std::istringstream in(text);
  const auto back = read_curve_csv(in);
  REQUIRE(back.size() == e.size());
  for (std::size_t j = 0; j < e.size(); ++j) {
    CHECK(back[j].x == e[j].x);
    CHECK(back[j].y == e[j].y);
  }

  std::istringstream no_trailing_newline(text.substr(0, text.size() - 1));
  CHECK(read_curve_csv(no_trailing_newline).size() == e.size());

  std::string skewed = "theta,x,y\n";
  for (std::size_t j = 0; j < 16; ++j) {
    const double th = kTwoPi * static_cast<double>(j) / 16.0 + (j == 5 ? 1e-3 : 0.0);
    skewed += format_double(th) + "," + format_double(std::cos(th)) + "," + format_double(std::sin(th)) + "\n";
  }
  std::istringstream bad(skewed);
  CHECK_THROWS_AS(read_curve_csv(bad), ParseError);

  std::istringstream garbage("theta,x,y\n0,1,zero\n");
  CHECK_THROWS_AS(read_curve_csv(garbage), ParseError);
}
