#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "unred/errors.hpp"
#include "unred/sigma.hpp"

using namespace unred;

namespace {

// Structure constants written out from the Levi-Civita symbol:
// [e_a, e_b] = 2 ε_abc e_c.
Vec3 bracket_by_table(const Vec3& a, const Vec3& b) {
  const std::array<double, 3> u{a.x, a.y, a.z}, v{b.x, b.y, b.z};
  std::array<double, 3> out{};
  auto eps = [](int i, int j, int k) { return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0; };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(k)] += 2.0 * eps(i, j, k) * u[i] * v[j];
  return {out[0], out[1], out[2]};
}

constexpr LieValue e1{{1, 0, 0}};
constexpr LieValue e2{{0, 1, 0}};
constexpr LieValue e3{{0, 0, 1}};
constexpr LieValue zero{{0, 0, 0}};

bool all_equal(const LieArray& r, const Vec3& value, double tol) {
  for (std::size_t i = 1; i < r.mx; ++i)
    for (std::size_t j = 1; j < r.mt; ++j)
      if (norm(r.at(i, j).c - value) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("bracket agrees with the structure-constant table and quaternion commutators") {
  std::mt19937 rng(41);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 a{g(rng), g(rng), g(rng)}, b{g(rng), g(rng), g(rng)};
    const auto br = bracket({a}, {b});
    CHECK(norm(br.c - bracket_by_table(a, b)) < 1e-12);
    const auto comm = Quaternion::pure(a) * Quaternion::pure(b) - Quaternion::pure(b) * Quaternion::pure(a);
    CHECK(std::abs(comm.w) < 1e-12);
    CHECK(norm(Vec3{comm.x, comm.y, comm.z} - br.c) < 1e-12);
  }
  CHECK(bracket(e3, e1) == LieValue{{0, 2, 0}});
  CHECK(reductive_identity_holds());
  CHECK(bracket(e3, e1).h_part() == zero);
  CHECK(bracket(e3, e2).h_part() == zero);
}

TEST_CASE("field shape validation") {
  CHECK_THROWS_AS(LieField(1, 4, std::vector<LieValue>(10), std::vector<LieValue>(10)), ShapeMismatch);
  CHECK_THROWS_AS(LieField(4, 4, std::vector<LieValue>(25), std::vector<LieValue>(24)), ShapeMismatch);
  CHECK_NOTHROW(LieField(4, 4, std::vector<LieValue>(25), std::vector<LieValue>(25)));
}

TEST_CASE("Euler-Poincare residual examples") {
  const LieValue xi{{0.4, -0.7, 0.0}};
  CHECK(ep_residual(LieField::constant(6, 5, xi, xi)).max_norm() < 1e-15);
  CHECK(ep_residual(LieField::constant(6, 5, 1.3 * e3, zero)).max_norm() < 1e-15);

  for (double alpha : {1.0, -0.5, 2.5}) {
    for (double beta : {1.0, 0.3}) {
      const auto r = ep_residual(LieField::constant(8, 8, alpha * e3 + beta * e1, zero));
      CHECK(all_equal(r, {0.0, 2.0 * alpha * beta, 0.0}, 1e-12));
    }
  }

  // A linear 𝔪-profile: ∂_t of t·e₁ plus ∂_x of x·e₂ is exact on the stencil.
  const auto linear = LieField::sample(
      6, 6, [](double, double t) { return t * e1; }, [](double x, double) { return x * e2; });
  CHECK(all_equal(ep_residual(linear), {1.0, 1.0, 0.0}, 1e-12));
}

TEST_CASE("Euler-Poincare residual ignores 𝔥-valued fields without 𝔪-part") {
  const auto pure_h = LieField::sample(
      8, 8, [](double x, double t) { return (std::sin(3 * x) + t * t) * e3; },
      [](double x, double t) { return std::cos(x * t) * e3; });
  CHECK(ep_residual(pure_h).max_norm() < 1e-15);
}

TEST_CASE("flatness residual examples") {
  const LieValue xi{{0.2, 0.5, -0.4}};
  CHECK(flatness_residual(LieField::constant(5, 5, xi, xi)).max_norm() < 1e-15);
  CHECK(all_equal(flatness_residual(LieField::constant(5, 5, e1, e2)), {0.0, 0.0, 2.0}, 1e-12));
}

TEST_CASE("reconstruction examples") {
  const UnitQuaternion g0 = normalized(Quaternion{0.3, -0.2, 0.9, 0.1});
  const auto still = reconstruct(LieField::constant(4, 4, zero, zero), g0);
  for (const auto& g : still.g) CHECK(norm(g - g0) < 1e-15);

  CHECK_THROWS_AS(reconstruct(LieField::constant(8, 8, e1, e2), g0), FlatnessError);

  const LieValue xi{{0.5, 0.3, 0.0}};
  const std::size_t m = 16;
  const auto rec = reconstruct(LieField::constant(m, m, xi, xi), g0);
  CHECK(rec.path_disagreement < 1e-6);
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      const double s = static_cast<double>(i + j) / static_cast<double>(m);
      CHECK(norm(rec.at(i, j) - g0 * exp_pure(s * xi.c)) < 1e-7);
    }
  }

  // The image of an 𝔪-valued exponential lies on one great circle.
  const Vec3 p0 = coset_project(rec.at(0, 0));
  const Vec3 p1 = coset_project(rec.at(0, m / 2));
  Vec3 axis = cross(p0, p1);
  axis = axis * (1.0 / norm(axis));
  for (const auto& g : rec.g) CHECK(std::abs(dot(coset_project(g), axis)) < 1e-9);
}

TEST_CASE("coset projection is constant on cosets of the subgroup") {
  std::mt19937 rng(43);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const auto q = normalized(Quaternion{g(rng), g(rng), g(rng), g(rng)});
    const auto h = exp_pure({0.0, 0.0, g(rng)});
    CHECK(norm(coset_project(q * h) - coset_project(q)) < 1e-12);
  }
}

TEST_CASE("projected exponential fields are geodesics to second order") {
  const LieValue xi{{0.5, 0.3, 0.0}};
  auto residual = [&](std::size_t m) {
    const auto rec = reconstruct(LieField::constant(m, m, xi, xi), {});
    std::vector<Vec3> along_t, along_x;
    for (std::size_t j = 0; j <= m; ++j) along_t.push_back(coset_project(rec.at(0, j)));
    for (std::size_t i = 0; i <= m; ++i) along_x.push_back(coset_project(rec.at(i, m / 2)));
    const double h = 1.0 / static_cast<double>(m);
    return std::max(geodesic_residual(along_t, h), geodesic_residual(along_x, h));
  };
  const double r16 = residual(16), r32 = residual(32), r64 = residual(64);
  CHECK(std::log2(r16 / r32) > 1.9);
  CHECK(std::log2(r32 / r64) > 1.9);
}
