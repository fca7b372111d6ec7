#include "unred/sigma.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "unred/errors.hpp"
#include "unred/hopf.hpp"

namespace unred {

LieField::LieField(std::size_t mx, std::size_t mt, std::vector<LieValue> sigma_t, std::vector<LieValue> sigma_x)
    : mx_(mx), mt_(mt), sigma_t_(std::move(sigma_t)), sigma_x_(std::move(sigma_x)) {
  if (mx_ < 2 || mt_ < 2) throw ShapeMismatch("LieField: need M_x, M_t >= 2");
  const std::size_t count = (mx_ + 1) * (mt_ + 1);
  if (sigma_t_.size() != count || sigma_x_.size() != count) {
    throw ShapeMismatch("LieField: component arrays must have (M_x+1)(M_t+1) entries");
  }
}

LieField LieField::constant(std::size_t mx, std::size_t mt, const LieValue& st, const LieValue& sx) {
  const std::size_t count = (mx + 1) * (mt + 1);
  return LieField(mx, mt, std::vector<LieValue>(count, st), std::vector<LieValue>(count, sx));
}

LieField LieField::sample(std::size_t mx, std::size_t mt, const std::function<LieValue(double, double)>& st,
                          const std::function<LieValue(double, double)>& sx) {
  std::vector<LieValue> a, b;
  a.reserve((mx + 1) * (mt + 1));
  b.reserve((mx + 1) * (mt + 1));
  for (std::size_t i = 0; i <= mx; ++i) {
    for (std::size_t j = 0; j <= mt; ++j) {
      const double x = static_cast<double>(i) / static_cast<double>(mx);
      const double t = static_cast<double>(j) / static_cast<double>(mt);
      a.push_back(st(x, t));
      b.push_back(sx(x, t));
    }
  }
  return LieField(mx, mt, std::move(a), std::move(b));
}

double LieArray::max_norm() const noexcept {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, norm(v));
  return m;
}

namespace {

template <class Node>
LieArray interior_map(const LieField& f, Node&& node) {
  LieArray out{f.mx(), f.mt(), std::vector<LieValue>((f.mx() + 1) * (f.mt() + 1))};
  for (std::size_t i = 1; i < f.mx(); ++i) {
    for (std::size_t j = 1; j < f.mt(); ++j) out.values[f.index(i, j)] = node(i, j);
  }
  return out;
}

}  // namespace

LieArray ep_residual(const LieField& f) {
  const double ix = 0.5 / f.dx();
  const double it = 0.5 / f.dt();
  return interior_map(f, [&](std::size_t i, std::size_t j) {
    const LieValue dt = it * (f.t(i, j + 1).m_part() - f.t(i, j - 1).m_part());
    const LieValue dx = ix * (f.x(i + 1, j).m_part() - f.x(i - 1, j).m_part());
    const LieValue& st = f.t(i, j);
    const LieValue& sx = f.x(i, j);
    return dt + dx + bracket(st.h_part(), st.m_part()) + bracket(sx.h_part(), sx.m_part());
  });
}

LieArray flatness_residual(const LieField& f) {
  const double ix = 0.5 / f.dx();
  const double it = 0.5 / f.dt();
  return interior_map(f, [&](std::size_t i, std::size_t j) {
    const LieValue dt_sx = it * (f.x(i, j + 1) - f.x(i, j - 1));
    const LieValue dx_st = ix * (f.t(i + 1, j) - f.t(i - 1, j));
    return dt_sx - dx_st + bracket(f.t(i, j), f.x(i, j));
  });
}

namespace {

// Value at the midpoint of [n, n+1] from the samples along a grid line,
// by cubic interpolation through four neighbours (one-sided at the ends).
Vec3 midpoint(const std::vector<Vec3>& line, std::size_t n) {
  const std::size_t last = line.size() - 1;
  if (last < 3) return 0.5 * (line[n] + line[n + 1]);
  if (n == 0) return (1.0 / 16.0) * (5.0 * line[0] + 15.0 * line[1] - 5.0 * line[2] + line[3]);
  if (n + 1 == last) {
    return (1.0 / 16.0) * (5.0 * line[last] + 15.0 * line[last - 1] - 5.0 * line[last - 2] + line[last - 3]);
  }
  return (1.0 / 16.0) * (-1.0 * line[n - 1] + 9.0 * line[n] + 9.0 * line[n + 1] - 1.0 * line[n + 2]);
}

// Integrates ġ = g·ξ along a grid line of spacing h, returning every node.
std::vector<Quaternion> integrate_line(const Quaternion& g0, const std::vector<Vec3>& line, double h) {
  std::vector<Quaternion> out(line.size());
  out[0] = g0;
  Quaternion g = g0;
  for (std::size_t n = 0; n + 1 < line.size(); ++n) {
    const Quaternion a = Quaternion::pure(line[n]);
    const Quaternion m = Quaternion::pure(midpoint(line, n));
    const Quaternion b = Quaternion::pure(line[n + 1]);
    const Quaternion k1 = g * a;
    const Quaternion k2 = (g + 0.5 * h * k1) * m;
    const Quaternion k3 = (g + 0.5 * h * k2) * m;
    const Quaternion k4 = (g + h * k3) * b;
    g = normalized(g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    out[n + 1] = g;
  }
  return out;
}

std::vector<Vec3> x_line(const LieField& f, std::size_t j) {
  std::vector<Vec3> line(f.mx() + 1);
  for (std::size_t i = 0; i <= f.mx(); ++i) line[i] = f.x(i, j).c;
  return line;
}

std::vector<Vec3> t_line(const LieField& f, std::size_t i) {
  std::vector<Vec3> line(f.mt() + 1);
  for (std::size_t j = 0; j <= f.mt(); ++j) line[j] = f.t(i, j).c;
  return line;
}

}  // namespace

Reconstruction reconstruct(const LieField& f, const UnitQuaternion& g0, double tolerance) {
  if (!(std::abs(norm(g0) - 1.0) <= 1e-8)) throw NormError("reconstruct: g0 is not of unit norm");
  const std::size_t mx = f.mx();
  const std::size_t mt = f.mt();
  Reconstruction r{mx, mt, std::vector<UnitQuaternion>((mx + 1) * (mt + 1)), 0.0};

  const auto bottom = integrate_line(g0, x_line(f, 0), f.dx());
  for (std::size_t i = 0; i <= mx; ++i) {
    const auto col = integrate_line(bottom[i], t_line(f, i), f.dt());
    for (std::size_t j = 0; j <= mt; ++j) r.g[f.index(i, j)] = col[j];
  }

  const auto left = integrate_line(g0, t_line(f, 0), f.dt());
  for (std::size_t j = 0; j <= mt; ++j) {
    const auto row = integrate_line(left[j], x_line(f, j), f.dx());
    for (std::size_t i = 0; i <= mx; ++i) {
      r.path_disagreement = std::max(r.path_disagreement, norm(row[i] - r.g[f.index(i, j)]));
    }
  }
  if (!(r.path_disagreement <= tolerance)) {
    throw FlatnessError("reconstruct: path orders disagree by " + std::to_string(r.path_disagreement) +
                        "; the field is not flat");
  }
  return r;
}

Vec3 coset_project(const UnitQuaternion& g) {
  static const Quaternion u{std::sqrt(0.5), 0.0, -std::sqrt(0.5), 0.0};
  return hopf_project(g * u);
}

double geodesic_residual(const std::vector<Vec3>& p, double spacing) {
  double worst = 0.0;
  const double inv2 = 1.0 / (spacing * spacing);
  for (std::size_t j = 1; j + 1 < p.size(); ++j) {
    const Vec3 acc = inv2 * (p[j + 1] - 2.0 * p[j] + p[j - 1]);
    const Vec3 vel = (0.5 / spacing) * (p[j + 1] - p[j - 1]);
    worst = std::max(worst, norm(acc + dot(vel, vel) * p[j]));
  }
  return worst;
}

bool reductive_identity_holds() noexcept {
  const LieValue e3{{0, 0, 1}};
  const std::array<LieValue, 2> m{LieValue{{1, 0, 0}}, LieValue{{0, 1, 0}}};
  for (const auto& b : m) {
    const LieValue r = bracket(e3, b);
    if (r.h_part().c.z != 0.0) return false;
  }
  return true;
}

}  // namespace unred
