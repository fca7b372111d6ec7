#include <doctest.h>

#include <array>
#include <cmath>

#include "helpers.hpp"
#include "unred/unreduction.hpp"

using namespace unred;

namespace {

// Two-point solve of −r'' + r'²/(2r) = 0, r(0) = 1, r(1) = 2, on the 3-point
// stencil with M = 8 (scipy fsolve, independent of this library). The values
// coincide with (1 + (√2 − 1)t)², which the stencil reproduces exactly.
constexpr std::array<double, 9> kRadialOracleM8{
    1.0, 1.1062342167691146, 1.2178300858899107, 1.3347876073623883, 1.4571067811865475,
    1.5847876073623883, 1.7178300858899107, 1.8562342167691146, 2.0};

double radial_profile(double t) {
  const double r = 1.0 + (std::sqrt(2.0) - 1.0) * t;
  return r * r;
}

// Bottom and top curves per column, x-edges the samplewise linear blend.
BoundaryData dirichlet_blend(const DiscreteCurve& bottom, const DiscreteCurve& top, std::size_t mx, std::size_t mt) {
  BoundaryData b;
  b.bottom.assign(mx + 1, bottom);
  b.top.assign(mx + 1, top);
  for (std::size_t j = 0; j <= mt; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(mt);
    std::vector<Vec2> pts(bottom.size());
    for (std::size_t q = 0; q < pts.size(); ++q) pts[q] = (1.0 - t) * bottom[q] + t * top[q];
    b.left.emplace_back(pts);
    b.right.emplace_back(pts);
  }
  return b;
}

BoundaryData periodic_pair(const DiscreteCurve& bottom, const DiscreteCurve& top, std::size_t mx, std::size_t mt) {
  BoundaryData b;
  b.bottom.assign(mx + 1, bottom);
  b.top.assign(mx + 1, top);
  b.x_boundary = XBoundary::periodic;
  b.periodic_mt = mt;
  return b;
}

double mean_radius(const DiscreteCurve& c) {
  double s = 0.0;
  for (const auto& p : c.samples()) s += norm(p);
  return s / static_cast<double>(c.size());
}

DiscreteCurve smooth_member(std::size_t n, double x, double t) {
  return sample_curve(n, [&](double th) {
    const double r = 1.0 + 0.3 * t + 0.1 * x + 0.05 * std::sin(2.0 * th + x) * (1.0 + t);
    return Vec2{r * std::cos(th) + 0.1 * x * t, r * std::sin(th) + 0.2 * t * t};
  });
}

}  // namespace

TEST_CASE("jets of a constant field vanish") {
  const auto field = CurveField::constant(4, 4, shapes::ellipse(32, 1.3, 0.9));
  const SobolevOperator op(0.1, 32);
  const auto d = jet_decompose(field, op);
  CHECK(d.h_t.max_abs() < 1e-14);
  CHECK(d.v_t.max_abs() < 1e-14);
  CHECK(d.h_x.max_abs() < 1e-14);
  CHECK(d.v_x.max_abs() < 1e-14);
  CHECK(d.H.max_abs() < 1e-14);
}

TEST_CASE("jets of a translated circle") {
  const std::size_t n = 32;
  const auto field = CurveField::sample(4, 4, [&](double, double t) { return shapes::circle(n, 1.0, {t, 0.0}); });
  const auto d = jet_decompose(field, SobolevOperator(0.0, n));
  for (std::size_t i = 0; i <= 4; ++i) {
    for (std::size_t j = 0; j <= 4; ++j) {
      for (std::size_t q = 0; q < n; ++q) {
        const double th = kTwoPi * static_cast<double>(q) / static_cast<double>(n);
        CHECK(std::abs(d.v_t.at(i, j)[q] + std::sin(th)) < 1e-12);
        CHECK(std::abs(d.h_t.at(i, j)[q] + std::cos(th)) < 1e-12);
      }
    }
  }
  CHECK(d.h_x.max_abs() < 1e-12);
  CHECK(d.v_x.max_abs() < 1e-12);
}

TEST_CASE("jets of a growing circle") {
  const std::size_t n = 32;
  const auto field = CurveField::sample(3, 5, [&](double, double t) { return shapes::circle(n, 1.0 + t); });
  const auto d = jet_decompose(field, SobolevOperator(0.2, n));
  for (double v : d.h_t.values()) CHECK(std::abs(v + 1.0) < 1e-12);
  CHECK(d.v_t.max_abs() < 1e-12);
  CHECK(d.h_x.max_abs() < 1e-12);
}

TEST_CASE("residual examples") {
  const std::size_t n = 32;
  const SobolevOperator op(0.0, n);

  const auto constant = CurveField::constant(4, 4, shapes::rounded_square(n));
  const auto dc = jet_decompose(constant, op);
  CHECK(residual_horizontal(constant, dc, op).max_abs() < 1e-12);
  CHECK(residual_vertical(constant, dc, op, ForceProfile::zero()).max_abs() < 1e-12);

  const auto rv = residual_vertical(constant, dc, op, ForceProfile::constant(0.7));
  for (std::size_t i = 0; i <= 4; ++i) {
    for (std::size_t j = 0; j <= 4; ++j) {
      const double expect = constant.is_interior(i, j) ? -0.7 : 0.0;
      for (double v : rv.at(i, j)) CHECK(v == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  // Concentric circles, radius 1 + t: R_h = ½ (R₁ − R₀)² / R(t).
  const std::size_t mt = 8;
  const auto growing = CurveField::sample(4, mt, [&](double, double t) { return shapes::circle(n, 1.0 + t); });
  const auto dg = jet_decompose(growing, op);
  const auto rh = residual_horizontal(growing, dg, op);
  for (std::size_t i = 1; i < 4; ++i) {
    for (std::size_t j = 1; j < mt; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(mt);
      for (double v : rh.at(i, j)) CHECK(std::abs(v - 0.5 / (1.0 + t)) < 1e-10);
    }
  }
  CHECK(residual_vertical(growing, dg, op, ForceProfile::zero()).max_abs() < 1e-12);
}

TEST_CASE("residuals are self-consistent under grid doubling") {
  const std::size_t n = 64;
  const SobolevOperator op(0.1, n);
  const auto force = ForceProfile::sinusoidal(0.2, 1);
  std::vector<FieldArray> rh, rv;
  const std::array<std::size_t, 3> ms{16, 32, 64};
  for (std::size_t m : ms) {
    const auto f = CurveField::sample(m, m, [&](double x, double t) { return smooth_member(n, x, t); });
    const auto d = jet_decompose(f, op);
    rh.push_back(residual_horizontal(f, d, op));
    rv.push_back(residual_vertical(f, d, op, force));
  }
  auto gap = [&](const std::vector<FieldArray>& r, std::size_t k) {
    double e = 0.0;
    const std::size_t m = ms[k];
    for (std::size_t i = 1; i < m; ++i)
      for (std::size_t j = 1; j < m; ++j)
        e = std::max(e, test::max_abs_diff(r[k].at(i, j), r[k + 1].at(2 * i, 2 * j)));
    return e;
  };
  CHECK(std::log2(gap(rh, 0) / gap(rh, 1)) > 1.9);
  CHECK(std::log2(gap(rv, 0) / gap(rv, 1)) > 1.9);
}

TEST_CASE("initial field and corner checks") {
  const auto b = dirichlet_blend(shapes::circle(16), shapes::circle(16, 2.0), 3, 3);
  const auto f = initial_field(b);
  CHECK(f.mx() == 3);
  CHECK(f.mt() == 3);
  CHECK(mean_radius(f.at(1, 1)) == doctest::Approx(1.0 + 1.0 / 3.0).epsilon(1e-12));

  auto bad = b;
  bad.left.front() = shapes::circle(16, 1.5);
  CHECK_THROWS_AS(initial_field(bad), CornerMismatch);
}

TEST_CASE("constant boundary data is an exact solution") {
  const auto field = CurveField::constant(4, 4, shapes::ellipse(64, 1.5, 1.0));
  const auto sol = solve_bvp(BoundaryData::of(field), SobolevOperator(0.1, 64), ForceProfile::zero(),
                             {.tol_res = 1e-12});
  CHECK(sol.report.converged);
  CHECK(sol.report.iterations <= 1);
  CHECK(sol.report.final_residual < 1e-12);
}

TEST_CASE("x-independent circle problem matches the radial two-point oracle") {
  const std::size_t n = 32;
  const auto sol = solve_bvp(periodic_pair(shapes::circle(n), shapes::circle(n, 2.0), 4, 8), SobolevOperator(0.1, n),
                             ForceProfile::zero(), {.tol_res = 1e-11});
  REQUIRE(sol.report.converged);
  for (std::size_t j = 0; j <= 8; ++j) {
    CHECK(std::abs(mean_radius(sol.field.at(0, j)) - kRadialOracleM8[j]) < 1e-6);
    for (std::size_t i = 1; i <= 4; ++i) CHECK(shape_distance(sol.field.at(i, j), sol.field.at(0, j)) < 1e-10);
  }
}

TEST_CASE("x-independent error against the continuum profile under refinement") {
  // The three-point stencil is exact on this quadratic profile, so the
  // O(Δ²) bound holds with a zero constant.
  const std::size_t n = 16;
  for (std::size_t m : {4, 8, 16}) {
    const auto sol = solve_bvp(periodic_pair(shapes::circle(n), shapes::circle(n, 2.0), 2, m),
                               SobolevOperator(0.1, n), ForceProfile::zero(), {.tol_res = 1e-11});
    double err = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(m);
      err = std::max(err, std::abs(mean_radius(sol.field.at(1, j)) - radial_profile(t)));
    }
    const double h = 1.0 / static_cast<double>(m);
    CHECK(err < 1e-9 + h * h * 1e-3);
  }
}

TEST_CASE("vertical conservation after a zero-force solve") {
  const std::size_t n = 32;
  const SobolevOperator op(0.1, n);
  const double tol = 1e-9;
  const auto sol = solve_bvp(dirichlet_blend(shapes::ellipse(n, 1.2, 0.9), shapes::circle(n, 1.6), 4, 4), op,
                             ForceProfile::zero(), {.tol_res = tol});
  REQUIRE(sol.report.converged);
  const auto d = jet_decompose(sol.field, op);
  CHECK(residual_vertical(sol.field, d, op, ForceProfile::zero()).max_abs() < tol);
  CHECK(residual_horizontal(sol.field, d, op).max_abs() < tol);
  CHECK(sol.report.max_abs_rv < tol);
}

TEST_CASE("non-convergence keeps the partial solution") {
  const std::size_t n = 32;
  try {
    solve_bvp(dirichlet_blend(shapes::circle(n), shapes::circle(n, 2.0), 4, 4), SobolevOperator(0.1, n),
              ForceProfile::zero(), {.tol_res = 1e-13, .max_iter = 1});
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK_FALSE(e.partial().report.converged);
    CHECK(e.partial().report.residual_history.size() >= 2);
    CHECK(e.partial().report.residual_history.back() < e.partial().report.residual_history.front());
    CHECK(e.partial().field.mx() == 4);
  }
}

TEST_CASE("relaxation agrees with Newton-Krylov where it is stable") {
  const std::size_t n = 16;
  const SobolevOperator op(0.05, n);
  const auto b = periodic_pair(shapes::circle(n), shapes::circle(n, 1.05), 2, 4);
  const auto newton = solve_bvp(b, op, ForceProfile::zero(), {.tol_res = 1e-10});
  const auto relax =
      solve_bvp(b, op, ForceProfile::zero(), {.method = SolverMethod::relaxation, .tol_res = 1e-10});
  CHECK(relax.report.converged);
  CHECK(relax.report.initial_tau > 0.0);
  for (std::size_t j = 0; j <= 4; ++j) CHECK(shape_distance(newton.field.at(1, j), relax.field.at(1, j)) < 1e-8);
}

TEST_CASE("energy examples") {
  const std::size_t n = 128;
  const SobolevOperator op(0.0, n);

  const auto e0 = energy(CurveField::constant(3, 3, shapes::circle(n)), op);
  CHECK(e0.total < 1e-25);

  const auto moving = CurveField::sample(4, 4, [&](double, double t) { return shapes::circle(n, 1.0, {t, 0.0}); });
  const auto em = energy(moving, op);
  CHECK(em.total == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(em.horizontal == doctest::Approx(kPi / 2.0).epsilon(1e-10));
  CHECK(em.vertical == doctest::Approx(kPi / 2.0).epsilon(1e-10));

  const auto growing = CurveField::sample(4, 4, [&](double, double t) { return shapes::circle(n, 1.0 + t); });
  const auto eg = energy(growing, op);
  CHECK(eg.vertical < 1e-20);
  CHECK(eg.horizontal == doctest::Approx(1.5 * kPi).epsilon(1e-10));
}

TEST_CASE("energy along the solve on concentric circles rises above the initial guess") {
  // The solved equations are not the Euler-Lagrange equations of this energy;
  // the continuum radial profile carries 0.8(√2 − 1)(4√2 − 1)π > 1.5π.
  const std::size_t n = 16;
  const auto sol = solve_bvp(periodic_pair(shapes::circle(n), shapes::circle(n, 2.0), 2, 16), SobolevOperator(0.0, n),
                             ForceProfile::zero(), {.tol_res = 1e-10, .track_energy = true});
  const auto& e = sol.report.energy_history;
  REQUIRE(e.size() >= 2);
  CHECK(e.front() == doctest::Approx(1.5 * kPi).epsilon(1e-10));
  CHECK(e.back() > e.front());
  const double continuum = 0.8 * (std::sqrt(2.0) - 1.0) * (4.0 * std::sqrt(2.0) - 1.0) * kPi;
  CHECK(e.back() == doctest::Approx(continuum).epsilon(5e-3));
}

TEST_CASE("equivariance under reparametrization of the boundary data") {
  const std::size_t n = 32;
  const SobolevOperator op(0.1, n);
  const auto b = dirichlet_blend(shapes::ellipse(n, 1.4, 1.0), shapes::circle(n, 1.8), 4, 4);
  const SolverConfig cfg{.tol_res = 1e-10};
  CHECK(equivariance_check(b, [](double t) { return t; }, op, ForceProfile::zero(), cfg) < 1e-12);
  CHECK(equivariance_check(b, [](double t) { return t + 1.0; }, op, ForceProfile::zero(), cfg) < 1e-6);
  CHECK(equivariance_check(b, [](double t) { return t + 0.3 * std::sin(t); }, op, ForceProfile::zero(), cfg) < 1e-3);
}
