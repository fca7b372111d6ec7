#include "unred/unreduction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/SparseLU>

#include "unred/parallel.hpp"
#include "unred/spectral.hpp"

namespace unred {
namespace {

constexpr double kCornerTolerance = 1e-8;

std::vector<FrenetData> all_frames(const CurveField& field) {
  std::vector<FrenetData> frames(field.node_count());
  parallel_for(field.node_count(), [&](std::size_t k) {
    const std::size_t i = k / (field.mt() + 1);
    const std::size_t j = k % (field.mt() + 1);
    frames[k] = frenet(field.at(i, j), DerivBackend::spectral);
  });
  return frames;
}

bool periodic(const CurveField& f) { return f.x_boundary() == XBoundary::periodic; }

// Column index of the node itself; in periodic mode column M_x aliases 0.
std::size_t x_self(const CurveField& f, std::size_t i) { return periodic(f) && i == f.mx() ? 0 : i; }
std::size_t x_minus(const CurveField& f, std::size_t i) {
  const std::size_t s = x_self(f, i);
  return periodic(f) && s == 0 ? f.mx() - 1 : s - 1;
}
std::size_t x_plus(const CurveField& f, std::size_t i) { return x_self(f, i) + 1; }

// Second-order first derivative along one grid direction. `get(k)` returns
// the curve at offset k along that direction, `pos`/`last` locate the node.
template <class Get>
std::vector<Vec2> first_difference(std::size_t pos, std::size_t last, bool wraps, double step, Get get,
                                   std::size_t n) {
  std::vector<Vec2> out(n);
  if (wraps || (pos > 0 && pos < last)) {
    const auto& m = get(-1);
    const auto& p = get(+1);
    for (std::size_t q = 0; q < n; ++q) out[q] = (p[q] - m[q]) * (0.5 / step);
  } else if (pos == 0) {
    const auto& c0 = get(0);
    const auto& c1 = get(1);
    const auto& c2 = get(2);
    for (std::size_t q = 0; q < n; ++q) out[q] = (-3.0 * c0[q] + 4.0 * c1[q] - c2[q]) * (0.5 / step);
  } else {
    const auto& c0 = get(0);
    const auto& c1 = get(-1);
    const auto& c2 = get(-2);
    for (std::size_t q = 0; q < n; ++q) out[q] = (3.0 * c0[q] - 4.0 * c1[q] + c2[q]) * (0.5 / step);
  }
  return out;
}

std::vector<Vec2> x_jet(const CurveField& f, std::size_t i, std::size_t j) {
  const bool wraps = periodic(f);
  auto get = [&](int k) -> const DiscreteCurve& {
    if (wraps) {
      if (k < 0) return f.at(x_minus(f, i), j);
      if (k > 0) return f.at(x_plus(f, i), j);
      return f.at(x_self(f, i), j);
    }
    return f.at(static_cast<std::size_t>(static_cast<long>(i) + k), j);
  };
  return first_difference(i, f.mx(), wraps, f.dx(), get, f.n());
}

std::vector<Vec2> t_jet(const CurveField& f, std::size_t i, std::size_t j) {
  auto get = [&](int k) -> const DiscreteCurve& { return f.at(i, static_cast<std::size_t>(static_cast<long>(j) + k)); };
  return first_difference(j, f.mt(), false, f.dt(), get, f.n());
}

struct NodeJets {
  std::vector<double> h_x, v_x, h_t, v_t;
};

NodeJets split_jets(const FrenetData& frame, const std::vector<Vec2>& cx, const std::vector<Vec2>& ct) {
  auto sx = decompose_velocity(frame, cx);
  auto st = decompose_velocity(frame, ct);
  return {std::move(sx.h), std::move(sx.v), std::move(st.h), std::move(st.v)};
}

struct NodeResidual {
  std::vector<double> rh, rv;
};

// Residual at an interior node from precomputed frames and first jets.
NodeResidual interior_residual(const CurveField& f, const std::vector<FrenetData>& frames, std::size_t i,
                               std::size_t j, const SobolevOperator& op, std::span<const double> force,
                               std::span<const double> h_x, std::span<const double> v_x,
                               std::span<const double> h_t, std::span<const double> v_t) {
  const std::size_t n = f.n();
  const std::size_t ic = x_self(f, i);
  const std::size_t im = x_minus(f, i);
  const std::size_t ip = x_plus(f, i);
  const DiscreteCurve& c = f.at(ic, j);
  const DiscreteCurve& cxm = f.at(im, j);
  const DiscreteCurve& cxp = f.at(ip, j);
  const DiscreteCurve& ctm = f.at(ic, j - 1);
  const DiscreteCurve& ctp = f.at(ic, j + 1);
  const FrenetData& fr = frames[f.index(ic, j)];
  const FrenetData& fxm = frames[f.index(im, j)];
  const FrenetData& fxp = frames[f.index(ip, j)];
  const FrenetData& ftm = frames[f.index(ic, j - 1)];
  const FrenetData& ftp = frames[f.index(ic, j + 1)];

  const double dx = f.dx();
  const double dt = f.dt();
  std::vector<double> lap_h(n), lap_v(n);
  for (std::size_t q = 0; q < n; ++q) {
    const Vec2 cx = (cxp[q] - cxm[q]) * (0.5 / dx);
    const Vec2 ct = (ctp[q] - ctm[q]) * (0.5 / dt);
    const Vec2 cxx = (cxp[q] - 2.0 * c[q] + cxm[q]) * (1.0 / (dx * dx));
    const Vec2 ctt = (ctp[q] - 2.0 * c[q] + ctm[q]) * (1.0 / (dt * dt));
    const Vec2 nx = (fxp.normal[q] - fxm.normal[q]) * (0.5 / dx);
    const Vec2 tx = (fxp.tangent[q] - fxm.tangent[q]) * (0.5 / dx);
    const Vec2 nt = (ftp.normal[q] - ftm.normal[q]) * (0.5 / dt);
    const Vec2 tt = (ftp.tangent[q] - ftm.tangent[q]) * (0.5 / dt);
    const Vec2& nrm = fr.normal[q];
    const Vec2& tan = fr.tangent[q];
    lap_h[q] = dot(cxx, nrm) + dot(cx, nx) + dot(ctt, nrm) + dot(ct, nt);
    lap_v[q] = dot(cxx, tan) + dot(cx, tx) + dot(ctt, tan) + dot(ct, tt);
  }

  const auto p_hx = op.apply(h_x);
  const auto p_vx = op.apply(v_x);
  const auto p_ht = op.apply(h_t);
  const auto p_vt = op.apply(v_t);
  std::vector<double> flux(n);
  for (std::size_t q = 0; q < n; ++q) flux[q] = h_x[q] * p_vx[q] + h_t[q] * p_vt[q];
  const auto d_flux = arclength_derivative(fr, flux);
  const auto p_lap_h = op.apply(lap_h);
  const auto p_lap_v = op.apply(lap_v);

  NodeResidual r{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t q = 0; q < n; ++q) {
    const double big_h = 0.5 * (h_x[q] * p_hx[q] + h_t[q] * p_ht[q]);
    r.rh[q] = p_lap_h[q] - d_flux[q] + fr.curvature[q] * big_h;
    r.rv[q] = p_lap_v[q] - force[q];
  }
  return r;
}

double node_rms(std::span<const double> rh, std::span<const double> rv) {
  double acc = 0.0;
  for (std::size_t q = 0; q < rh.size(); ++q) acc += rh[q] * rh[q] + rv[q] * rv[q];
  return std::sqrt(acc / static_cast<double>(rh.size()));
}

void check_decomp(const CurveField& f, const JetDecomposition& d) {
  for (const FieldArray* a : {&d.h_t, &d.v_t, &d.h_x, &d.v_x, &d.H}) {
    if (a->mx() != f.mx() || a->mt() != f.mt() || a->n() != f.n()) {
      throw ShapeMismatch("jet decomposition does not match the field shape");
    }
  }
}

void check_operator(const CurveField& f, const SobolevOperator& op) {
  if (op.size() != f.n()) {
    throw LengthMismatch("Sobolev operator size " + std::to_string(op.size()) + " does not match N = " +
                         std::to_string(f.n()));
  }
}

// Interior node list in a fixed order.
std::vector<std::pair<std::size_t, std::size_t>> interior_nodes(const CurveField& f) {
  std::vector<std::pair<std::size_t, std::size_t>> nodes;
  for (std::size_t i = 0; i <= f.mx(); ++i) {
    for (std::size_t j = 0; j <= f.mt(); ++j) {
      if (f.is_interior(i, j)) nodes.emplace_back(i, j);
    }
  }
  return nodes;
}

// Residuals plus the preconditioned update direction at every interior node.
struct Evaluation {
  FieldArray rh, rv;
  std::vector<std::vector<Vec2>> direction;  // per interior node, in interior_nodes() order
  double norm = 0.0;
};

Evaluation evaluate(const CurveField& f, const SobolevOperator& op, const std::vector<double>& force) {
  const auto frames = all_frames(f);
  const auto nodes = interior_nodes(f);
  Evaluation ev{FieldArray(f.mx(), f.mt(), f.n()), FieldArray(f.mx(), f.mt(), f.n()),
                std::vector<std::vector<Vec2>>(nodes.size()), 0.0};
  std::vector<double> rms(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t k) {
    const auto [i, j] = nodes[k];
    const auto& fr = frames[f.index(i, j)];
    const auto jets = split_jets(fr, x_jet(f, i, j), t_jet(f, i, j));
    auto r = interior_residual(f, frames, i, j, op, force, jets.h_x, jets.v_x, jets.h_t, jets.v_t);
    std::copy(r.rh.begin(), r.rh.end(), ev.rh.at(i, j).begin());
    std::copy(r.rv.begin(), r.rv.end(), ev.rv.at(i, j).begin());
    rms[k] = node_rms(r.rh, r.rv);
    const auto dh = op.solve(r.rh);
    const auto dv = op.solve(r.rv);
    ev.direction[k] = recompose_velocity(fr, dv, dh);
  });
  for (double v : rms) ev.norm = std::max(ev.norm, v);
  if (!std::isfinite(ev.norm)) ev.norm = std::numeric_limits<double>::infinity();
  return ev;
}

CurveField step(const CurveField& f, const Evaluation& ev, double tau) {
  CurveField out = f;
  const auto nodes = interior_nodes(f);
  std::vector<std::vector<Vec2>> moved(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const auto [i, j] = nodes[k];
    const auto& c = f.at(i, j);
    std::vector<Vec2> pts(c.samples().begin(), c.samples().end());
    for (std::size_t q = 0; q < pts.size(); ++q) pts[q] += tau * ev.direction[k][q];
    moved[k] = std::move(pts);
  });
  for (std::size_t k = 0; k < nodes.size(); ++k) out.set(nodes[k].first, nodes[k].second, DiscreteCurve(std::move(moved[k])));
  if (periodic(out)) {
    for (std::size_t j = 0; j <= out.mt(); ++j) out.set(out.mx(), j, out.at(0, j));
  }
  return out;
}

void check_same_n(const std::vector<DiscreteCurve>& edge, std::size_t n, const char* name) {
  for (const auto& c : edge) {
    if (c.size() != n) throw ShapeMismatch(std::string("boundary edge '") + name + "' mixes sample counts");
  }
}

double max_point_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) m = std::max(m, norm(a[q] - b[q]));
  return m;
}

}  // namespace

CurveField::CurveField(std::size_t mx, std::size_t mt, std::vector<DiscreteCurve> curves, XBoundary x_boundary)
    : mx_(mx), mt_(mt), x_boundary_(x_boundary), curves_(std::move(curves)) {
  if (mx < 2 || mt < 2) throw ShapeMismatch("CurveField: M_x and M_t must be at least 2");
  if (curves_.size() != (mx + 1) * (mt + 1)) throw ShapeMismatch("CurveField: wrong number of curves");
  const std::size_t n = curves_.front().size();
  for (const auto& c : curves_) {
    if (c.size() != n) throw ShapeMismatch("CurveField: curves must share N");
  }
}

void CurveField::set(std::size_t i, std::size_t j, DiscreteCurve c) {
  if (c.size() != n()) throw ShapeMismatch("CurveField::set: curve has the wrong N");
  curves_[index(i, j)] = std::move(c);
}

bool CurveField::is_interior(std::size_t i, std::size_t j) const noexcept {
  if (j == 0 || j == mt_) return false;
  if (x_boundary_ == XBoundary::periodic) return i < mx_;
  return i > 0 && i < mx_;
}

CurveField CurveField::constant(std::size_t mx, std::size_t mt, const DiscreteCurve& c, XBoundary x_boundary) {
  return CurveField(mx, mt, std::vector<DiscreteCurve>((mx + 1) * (mt + 1), c), x_boundary);
}

CurveField CurveField::sample(std::size_t mx, std::size_t mt, const std::function<DiscreteCurve(double, double)>& c,
                              XBoundary x_boundary) {
  std::vector<DiscreteCurve> curves;
  curves.reserve((mx + 1) * (mt + 1));
  for (std::size_t i = 0; i <= mx; ++i) {
    for (std::size_t j = 0; j <= mt; ++j) {
      const std::size_t ii = x_boundary == XBoundary::periodic && i == mx ? 0 : i;
      curves.push_back(c(static_cast<double>(ii) / static_cast<double>(mx), static_cast<double>(j) / static_cast<double>(mt)));
    }
  }
  return CurveField(mx, mt, std::move(curves), x_boundary);
}

double FieldArray::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

JetDecomposition jet_decompose(const CurveField& field, const SobolevOperator& op) {
  check_operator(field, op);
  const auto frames = all_frames(field);
  JetDecomposition d{FieldArray(field.mx(), field.mt(), field.n()), FieldArray(field.mx(), field.mt(), field.n()),
                     FieldArray(field.mx(), field.mt(), field.n()), FieldArray(field.mx(), field.mt(), field.n()),
                     FieldArray(field.mx(), field.mt(), field.n())};
  parallel_for(field.node_count(), [&](std::size_t k) {
    const std::size_t i = k / (field.mt() + 1);
    const std::size_t j = k % (field.mt() + 1);
    const auto jets = split_jets(frames[k], x_jet(field, i, j), t_jet(field, i, j));
    const auto p_hx = op.apply(jets.h_x);
    const auto p_ht = op.apply(jets.h_t);
    auto hx = d.h_x.at(i, j), vx = d.v_x.at(i, j), ht = d.h_t.at(i, j), vt = d.v_t.at(i, j), big_h = d.H.at(i, j);
    for (std::size_t q = 0; q < field.n(); ++q) {
      hx[q] = jets.h_x[q];
      vx[q] = jets.v_x[q];
      ht[q] = jets.h_t[q];
      vt[q] = jets.v_t[q];
      big_h[q] = 0.5 * (jets.h_x[q] * p_hx[q] + jets.h_t[q] * p_ht[q]);
    }
  });
  return d;
}

FieldArray residual_horizontal(const CurveField& field, const JetDecomposition& decomp, const SobolevOperator& op) {
  check_operator(field, op);
  check_decomp(field, decomp);
  const auto frames = all_frames(field);
  const auto nodes = interior_nodes(field);
  const std::vector<double> no_force(field.n(), 0.0);
  FieldArray out(field.mx(), field.mt(), field.n());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const auto [i, j] = nodes[k];
    const auto r = interior_residual(field, frames, i, j, op, no_force, decomp.h_x.at(i, j), decomp.v_x.at(i, j),
                                     decomp.h_t.at(i, j), decomp.v_t.at(i, j));
    std::copy(r.rh.begin(), r.rh.end(), out.at(i, j).begin());
  });
  return out;
}

FieldArray residual_vertical(const CurveField& field, const JetDecomposition& decomp, const SobolevOperator& op,
                             const ForceProfile& force) {
  check_operator(field, op);
  check_decomp(field, decomp);
  const auto frames = all_frames(field);
  const auto nodes = interior_nodes(field);
  const auto fv = force.evaluate(field.n());
  FieldArray out(field.mx(), field.mt(), field.n());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const auto [i, j] = nodes[k];
    const auto r = interior_residual(field, frames, i, j, op, fv, decomp.h_x.at(i, j), decomp.v_x.at(i, j),
                                     decomp.h_t.at(i, j), decomp.v_t.at(i, j));
    std::copy(r.rv.begin(), r.rv.end(), out.at(i, j).begin());
  });
  return out;
}

double residual_norm(const CurveField& field, const FieldArray& rh, const FieldArray& rv) {
  double m = 0.0;
  for (const auto& [i, j] : interior_nodes(field)) m = std::max(m, node_rms(rh.at(i, j), rv.at(i, j)));
  return m;
}

std::size_t BoundaryData::mt() const noexcept {
  if (x_boundary == XBoundary::periodic) return periodic_mt;
  return left.empty() ? 0 : left.size() - 1;
}

BoundaryData BoundaryData::of(const CurveField& field) {
  BoundaryData b;
  b.x_boundary = field.x_boundary();
  b.periodic_mt = field.mt();
  for (std::size_t i = 0; i <= field.mx(); ++i) {
    b.bottom.push_back(field.at(i, 0));
    b.top.push_back(field.at(i, field.mt()));
  }
  for (std::size_t j = 0; j <= field.mt(); ++j) {
    b.left.push_back(field.at(0, j));
    b.right.push_back(field.at(field.mx(), j));
  }
  return b;
}

BoundaryData BoundaryData::reparametrized(const std::function<double(double)>& phi) const {
  BoundaryData b;
  b.x_boundary = x_boundary;
  b.periodic_mt = periodic_mt;
  auto map = [&](const std::vector<DiscreteCurve>& edge) {
    std::vector<DiscreteCurve> out;
    out.reserve(edge.size());
    for (const auto& c : edge) out.push_back(reparametrize(c, phi));
    return out;
  };
  b.bottom = map(bottom);
  b.top = map(top);
  b.left = map(left);
  b.right = map(right);
  return b;
}

CurveField initial_field(const BoundaryData& b) {
  const std::size_t mx = b.mx();
  if (mx < 2 || b.top.size() != b.bottom.size()) throw ShapeMismatch("boundary: bottom/top edges need M_x+1 ≥ 3 curves");
  const std::size_t n = b.bottom.front().size();
  check_same_n(b.bottom, n, "bottom");
  check_same_n(b.top, n, "top");

  if (b.x_boundary == XBoundary::periodic) {
    if (max_point_distance(b.bottom.front(), b.bottom.back()) > kCornerTolerance ||
        max_point_distance(b.top.front(), b.top.back()) > kCornerTolerance) {
      throw CornerMismatch("periodic boundary: edge entries 0 and M_x differ");
    }
  }

  std::size_t mt = 0;
  if (b.x_boundary == XBoundary::dirichlet) {
    if (b.left.size() != b.right.size() || b.left.size() < 3) {
      throw ShapeMismatch("boundary: left/right edges need M_t+1 ≥ 3 curves");
    }
    mt = b.left.size() - 1;
    check_same_n(b.left, n, "left");
    check_same_n(b.right, n, "right");
    const std::pair<const DiscreteCurve*, const DiscreteCurve*> corners[] = {
        {&b.bottom.front(), &b.left.front()},
        {&b.bottom.back(), &b.right.front()},
        {&b.top.front(), &b.left.back()},
        {&b.top.back(), &b.right.back()}};
    for (const auto& [p, q] : corners) {
      if (max_point_distance(*p, *q) > kCornerTolerance) throw CornerMismatch("boundary edges disagree at a corner");
    }
  } else {
    mt = b.periodic_mt;
    if (mt < 2) throw ShapeMismatch("periodic boundary: periodic_mt must be at least 2");
  }

  std::vector<DiscreteCurve> curves;
  curves.reserve((mx + 1) * (mt + 1));
  for (std::size_t i = 0; i <= mx; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(mx);
    for (std::size_t j = 0; j <= mt; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(mt);
      if (j == 0) {
        curves.push_back(b.bottom[i]);
        continue;
      }
      if (j == mt) {
        curves.push_back(b.top[i]);
        continue;
      }
      if (b.x_boundary == XBoundary::dirichlet && (i == 0 || i == mx)) {
        curves.push_back(i == 0 ? b.left[j] : b.right[j]);
        continue;
      }
      std::vector<Vec2> pts(n);
      for (std::size_t q = 0; q < n; ++q) {
        const Vec2 tb = (1.0 - t) * b.bottom[i][q] + t * b.top[i][q];
        if (b.x_boundary == XBoundary::periodic) {
          pts[q] = tb;
          continue;
        }
        const Vec2 lr = (1.0 - x) * b.left[j][q] + x * b.right[j][q];
        const Vec2 corner = (1.0 - x) * (1.0 - t) * b.bottom.front()[q] + x * (1.0 - t) * b.bottom.back()[q] +
                            (1.0 - x) * t * b.top.front()[q] + x * t * b.top.back()[q];
        pts[q] = tb + lr - corner;
      }
      curves.emplace_back(std::move(pts));
    }
  }
  return CurveField(mx, mt, std::move(curves), b.x_boundary);
}

FieldEnergy energy(const CurveField& field, const SobolevOperator& op) {
  const auto d = jet_decompose(field, op);
  const auto frames = all_frames(field);
  const double wx = field.dx();
  const double wt = field.dt();
  FieldEnergy e;
  for (std::size_t i = 0; i <= field.mx(); ++i) {
    double cx = wx;
    if (field.x_boundary() == XBoundary::periodic) {
      if (i == field.mx()) continue;
    } else if (i == 0 || i == field.mx()) {
      cx *= 0.5;
    }
    for (std::size_t j = 0; j <= field.mt(); ++j) {
      const double ct = (j == 0 || j == field.mt()) ? 0.5 * wt : wt;
      const auto& fr = frames[field.index(i, j)];
      const double eh = scalar_pair(op, fr, d.h_x.at(i, j), d.h_x.at(i, j)) + scalar_pair(op, fr, d.h_t.at(i, j), d.h_t.at(i, j));
      const double ev = scalar_pair(op, fr, d.v_x.at(i, j), d.v_x.at(i, j)) + scalar_pair(op, fr, d.v_t.at(i, j), d.v_t.at(i, j));
      e.horizontal += 0.5 * cx * ct * eh;
      e.vertical += 0.5 * cx * ct * ev;
    }
  }
  e.total = e.horizontal + e.vertical;
  return e;
}

namespace {

std::vector<double> flatten(const std::vector<std::vector<Vec2>>& per_node) {
  std::vector<double> out;
  out.reserve(per_node.size() * (per_node.empty() ? 0 : 2 * per_node.front().size()));
  for (const auto& node : per_node) {
    for (const auto& p : node) {
      out.push_back(p.x);
      out.push_back(p.y);
    }
  }
  return out;
}

std::vector<double> gather(const CurveField& f) {
  std::vector<double> out;
  for (const auto& [i, j] : interior_nodes(f)) {
    for (const auto& p : f.at(i, j).samples()) {
      out.push_back(p.x);
      out.push_back(p.y);
    }
  }
  return out;
}

// f with every interior curve moved by scale·delta (flattened as in gather()).
CurveField displaced(const CurveField& f, const std::vector<double>& delta, double scale) {
  const auto nodes = interior_nodes(f);
  std::vector<std::vector<Vec2>> dir(nodes.size(), std::vector<Vec2>(f.n()));
  std::size_t at = 0;
  for (auto& node : dir) {
    for (auto& p : node) {
      p = {delta[at], delta[at + 1]};
      at += 2;
    }
  }
  Evaluation ev;
  ev.direction = std::move(dir);
  return step(f, ev, scale);
}

double rms(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(v.size()));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

// Evaluates periodic samples at fixed off-grid parameters: spectral
// upsampling by 8, then six-point Lagrange interpolation on the fine grid.
// Accurate to about 1e-6 relative at the Nyquist mode, which is plenty for a
// preconditioner, at O(N log N) per call instead of O(N²).
class PeriodicResampler {
 public:
  static constexpr std::size_t kFactor = 8;
  static constexpr std::size_t kPoints = 6;

  PeriodicResampler() = default;
  explicit PeriodicResampler(std::span<const double> thetas, std::size_t n)
      : first_(thetas.size()), weight_(thetas.size()) {
    const double fine = static_cast<double>(n * kFactor);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      double u = thetas[i] / kTwoPi * fine;
      u -= fine * std::floor(u / fine);
      const double cell = std::floor(u);
      const double frac = u - cell;
      first_[i] = static_cast<std::ptrdiff_t>(cell) - static_cast<std::ptrdiff_t>(kPoints / 2 - 1);
      for (std::size_t a = 0; a < kPoints; ++a) {
        const double xa = static_cast<double>(a) - static_cast<double>(kPoints / 2 - 1);
        double w = 1.0;
        for (std::size_t b = 0; b < kPoints; ++b) {
          if (b == a) continue;
          const double xb = static_cast<double>(b) - static_cast<double>(kPoints / 2 - 1);
          w *= (frac - xb) / (xa - xb);
        }
        weight_[i][a] = w;
      }
    }
  }

  std::vector<double> operator()(std::span<const double> samples) const {
    const auto fine = spectral::upsample(samples, kFactor);
    const auto m = static_cast<std::ptrdiff_t>(fine.size());
    std::vector<double> out(first_.size());
    for (std::size_t i = 0; i < first_.size(); ++i) {
      double acc = 0.0;
      for (std::size_t a = 0; a < kPoints; ++a) {
        std::ptrdiff_t idx = (first_[i] + static_cast<std::ptrdiff_t>(a)) % m;
        if (idx < 0) idx += m;
        acc += weight_[i][a] * fine[static_cast<std::size_t>(idx)];
      }
      out[i] = acc;
    }
    return out;
  }

 private:
  std::vector<std::ptrdiff_t> first_;
  std::vector<std::array<double, kPoints>> weight_;
};

// Approximate inverse Jacobian of G = P⁻¹R_h n + P⁻¹R_v t, assembled per
// θ-wavenumber. In the frame components (h, v) of a rotationally symmetric
// field, G is circulant in θ, so its Jacobian splits into one sparse (x, t)
// system per mode. The circulant symbols are measured by finite differences:
// point perturbations at a set of nodes with disjoint stencils, one set per
// colour and per frame component, repeated at kSites base samples spread
// around the curve. Averaging the aligned responses over the sites gives the
// circulant closest to a field that is only nearly symmetric.
//
// The symbols are measured on the field resampled by arc length, and vectors
// are carried between the two parametrizations node by node. Without this a
// non-uniform parametrization changes the D_θ terms by a θ-dependent factor,
// and at high θ-modes the linearization is wave-like, so no θ-local
// correction repairs it.
//
// The resampling round trip drops the highest modes of the original
// parametrization. apply() can solve that part separately with the same
// symbols in the field's own frames, which gives the preconditioner full rank.
class ModePreconditioner {
 public:
  ModePreconditioner(const CurveField& f, const SobolevOperator& op, const std::vector<double>& fv)
      : n_(f.n()), modes_(f.n() / 2 + 1), nodes_(interior_nodes(f)) {
    std::vector<DiscreteCurve> uniform(f.node_count(), f.at(0, 0));
    parallel_for(f.node_count(), [&](std::size_t idx) {
      uniform[idx] = resample_by_arclength(f.at(idx / (f.mt() + 1), idx % (f.mt() + 1)), n_);
    });
    const CurveField g(f.mx(), f.mt(), std::move(uniform), f.x_boundary());
    const auto frames = all_frames(g);
    const auto own_frames = all_frames(f);
    index_.assign(g.node_count(), kNone);
    to_uniform_.resize(nodes_.size());
    from_uniform_.resize(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const auto [i, j] = nodes_[k];
      index_[g.index(i, j)] = k;
      normals_.push_back(frames[g.index(i, j)].normal);
      tangents_.push_back(frames[g.index(i, j)].tangent);
      own_normals_.push_back(own_frames[f.index(i, j)].normal);
      own_tangents_.push_back(own_frames[f.index(i, j)].tangent);
    }
    parallel_for(nodes_.size(), [&](std::size_t k) {
      const auto [i, j] = nodes_[k];
      to_uniform_[k] = PeriodicResampler(arclength_parameters(f.at(i, j), n_), n_);
      from_uniform_[k] = PeriodicResampler(arclength_positions(f.at(i, j)), n_);
    });
    build(g, op, fv);
  }

  // The arc-length grid cannot hold the highest modes of a strongly
  // non-uniform parametrization. With `complement`, whatever the round trip
  // loses is solved directly in the original parametrization, so no direction
  // is dropped. That helps on non-circular data and hurts on warped circles,
  // so the caller decides.
  std::vector<double> apply(const std::vector<double>& w, bool complement) const {
    const std::size_t count = nodes_.size();
    NodeVectors uniform(count), rest(count);
    parallel_for(count, [&](std::size_t k) {
      for (std::size_t d = 0; d < 2; ++d) {
        std::vector<double> wc(n_);
        for (std::size_t q = 0; q < n_; ++q) wc[q] = w[(k * n_ + q) * 2 + d];
        uniform[k][d] = to_uniform_[k](wc);
        if (!complement) continue;
        const auto back = from_uniform_[k](uniform[k][d]);
        for (std::size_t q = 0; q < n_; ++q) wc[q] -= back[q];
        rest[k][d] = std::move(wc);
      }
    });
    const auto main = solve_modes(uniform, normals_, tangents_);
    const auto extra = complement ? solve_modes(rest, own_normals_, own_tangents_) : NodeVectors{};
    std::vector<double> out(w.size());
    parallel_for(count, [&](std::size_t k) {
      for (std::size_t d = 0; d < 2; ++d) {
        const auto mapped = from_uniform_[k](main[k][d]);
        for (std::size_t q = 0; q < n_; ++q) out[(k * n_ + q) * 2 + d] = complement ? mapped[q] + extra[k][d][q] : mapped[q];
      }
    });
    return out;
  }

 private:
  using Solver = Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>, Eigen::COLAMDOrdering<int>>;
  using NodeVectors = std::vector<std::array<std::vector<double>, 2>>;  // per node: x and y samples

  // Frame components, FFT, one sparse solve per mode, and back to Cartesian.
  NodeVectors solve_modes(const NodeVectors& in, const std::vector<std::vector<Vec2>>& normals,
                          const std::vector<std::vector<Vec2>>& tangents) const {
    const std::size_t count = nodes_.size();
    std::vector<std::vector<spectral::Complex>> hat(2 * count);
    parallel_for(count, [&](std::size_t k) {
      std::vector<double> h(n_), v(n_);
      for (std::size_t q = 0; q < n_; ++q) {
        const Vec2 u{in[k][0][q], in[k][1][q]};
        h[q] = dot(u, normals[k][q]);
        v[q] = dot(u, tangents[k][q]);
      }
      hat[2 * k] = spectral::forward(h);
      hat[2 * k + 1] = spectral::forward(v);
    });
    parallel_for(modes_, [&](std::size_t m) {
      if (!solvers_[m]) return;
      Eigen::VectorXcd b(static_cast<Eigen::Index>(2 * count));
      for (std::size_t r = 0; r < 2 * count; ++r) b(static_cast<Eigen::Index>(r)) = hat[r][m];
      const Eigen::VectorXcd x = solvers_[m]->solve(b);
      for (std::size_t r = 0; r < 2 * count; ++r) hat[r][m] = x(static_cast<Eigen::Index>(r));
    });
    NodeVectors out(count);
    parallel_for(count, [&](std::size_t k) {
      const auto h = spectral::inverse(hat[2 * k], n_);
      const auto v = spectral::inverse(hat[2 * k + 1], n_);
      out[k][0].resize(n_);
      out[k][1].resize(n_);
      for (std::size_t q = 0; q < n_; ++q) {
        const Vec2 u = h[q] * normals[k][q] + v[q] * tangents[k][q];
        out[k][0][q] = u.x;
        out[k][1][q] = u.y;
      }
    });
    return out;
  }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kSites = 8;

  void build(const CurveField& f, const SobolevOperator& op, const std::vector<double>& fv) {
    const auto base = evaluate(f, op, fv);
    const auto hood = neighbourhoods(f);
    const auto colour = colouring(hood);
    const std::size_t colours = colour.empty() ? 0 : *std::max_element(colour.begin(), colour.end()) + 1;
    const std::size_t dim = 2 * nodes_.size();
    const std::size_t sites = std::min(kSites, n_);
    const double eps = 1e-6;
    // acc[k][comp][a]: symbols (h row, v row) of the response at hood[k][a].
    using Symbols = std::array<std::vector<spectral::Complex>, 2>;
    std::vector<std::array<std::vector<Symbols>, 2>> acc(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      for (auto& per_comp : acc[k]) {
        per_comp.assign(hood[k].size(), Symbols{std::vector<spectral::Complex>(modes_), std::vector<spectral::Complex>(modes_)});
      }
    }
    // Averaging the aligned columns over base samples spread around the curve
    // approximates the best circulant fit, which matters once the
    // coefficients vary along the curve.
    for (std::size_t site = 0; site < sites; ++site) {
      const std::size_t q0 = site * n_ / sites;
      for (std::size_t c = 0; c < colours; ++c) {
        for (int comp = 0; comp < 2; ++comp) {
          std::vector<std::vector<Vec2>> delta(nodes_.size(), std::vector<Vec2>(n_));
          for (std::size_t k = 0; k < nodes_.size(); ++k) {
            if (colour[k] == c) delta[k][q0] = comp == 0 ? normals_[k][q0] : tangents_[k][q0];
          }
          Evaluation shift;
          shift.direction = std::move(delta);
          const auto moved = evaluate(step(f, shift, eps), op, fv);
          parallel_for(nodes_.size(), [&](std::size_t k) {
            if (colour[k] != c) return;
            for (std::size_t a = 0; a < hood[k].size(); ++a) {
              const std::size_t r = hood[k][a];
              std::vector<double> rh(n_), rv(n_);
              for (std::size_t q = 0; q < n_; ++q) {
                const std::size_t src = (q + q0) % n_;
                const Vec2 d = (moved.direction[r][src] - base.direction[r][src]) * (1.0 / eps);
                rh[q] = dot(d, normals_[r][src]);
                rv[q] = dot(d, tangents_[r][src]);
              }
              const auto sh = spectral::forward(rh);
              const auto sv = spectral::forward(rv);
              auto& out = acc[k][static_cast<std::size_t>(comp)][a];
              for (std::size_t m = 0; m < modes_; ++m) {
                out[0][m] += sh[m];
                out[1][m] += sv[m];
              }
            }
          });
        }
      }
    }
    const double weight = 1.0 / static_cast<double>(sites);
    std::vector<std::vector<Eigen::Triplet<std::complex<double>>>> entries(modes_);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      for (std::size_t comp = 0; comp < 2; ++comp) {
        const auto col = static_cast<Eigen::Index>(2 * k + comp);
        for (std::size_t a = 0; a < hood[k].size(); ++a) {
          const auto row = static_cast<Eigen::Index>(2 * hood[k][a]);
          for (std::size_t m = 0; m < modes_; ++m) {
            entries[m].emplace_back(row, col, weight * acc[k][comp][a][0][m]);
            entries[m].emplace_back(row + 1, col, weight * acc[k][comp][a][1][m]);
          }
        }
      }
    }
    solvers_.resize(modes_);
    parallel_for(modes_, [&](std::size_t m) {
      Eigen::SparseMatrix<std::complex<double>> mat(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      mat.setFromTriplets(entries[m].begin(), entries[m].end());
      mat.makeCompressed();
      auto lu = std::make_unique<Solver>();
      lu->compute(mat);
      if (lu->info() == Eigen::Success) solvers_[m] = std::move(lu);
    });
  }

  // Interior nodes whose residual reads node k: k itself and its grid neighbours.
  std::vector<std::vector<std::size_t>> neighbourhoods(const CurveField& f) const {
    std::vector<std::vector<std::size_t>> hood(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const auto [i, j] = nodes_[k];
      std::vector<std::pair<std::size_t, std::size_t>> cand{{i, j}, {i, j - 1}, {i, j + 1}};
      if (periodic(f)) {
        cand.emplace_back(x_minus(f, i), j);
        cand.emplace_back(x_plus(f, i) == f.mx() ? 0 : x_plus(f, i), j);
      } else {
        cand.emplace_back(i - 1, j);
        cand.emplace_back(i + 1, j);
      }
      for (const auto& [a, b] : cand) {
        const std::size_t r = index_[f.index(a, b)];
        if (r != kNone && std::find(hood[k].begin(), hood[k].end(), r) == hood[k].end()) hood[k].push_back(r);
      }
    }
    return hood;
  }

  // Greedy colouring so that nodes sharing a colour have disjoint neighbourhoods.
  static std::vector<std::size_t> colouring(const std::vector<std::vector<std::size_t>>& hood) {
    std::vector<std::size_t> colour(hood.size(), kNone);
    std::vector<std::vector<std::size_t>> touched;  // per colour: residual nodes already covered
    for (std::size_t k = 0; k < hood.size(); ++k) {
      for (std::size_t c = 0;; ++c) {
        if (c == touched.size()) touched.emplace_back(hood.size(), 0);
        const bool clash = std::any_of(hood[k].begin(), hood[k].end(), [&](std::size_t r) { return touched[c][r] != 0; });
        if (clash) continue;
        colour[k] = c;
        for (std::size_t r : hood[k]) touched[c][r] = 1;
        break;
      }
    }
    return colour;
  }

  std::size_t n_;
  std::size_t modes_;
  std::vector<std::pair<std::size_t, std::size_t>> nodes_;
  std::vector<std::size_t> index_;
  std::vector<std::vector<Vec2>> normals_, tangents_;          // arc-length resampled field
  std::vector<std::vector<Vec2>> own_normals_, own_tangents_;  // field as given
  std::vector<PeriodicResampler> to_uniform_, from_uniform_;
  std::vector<std::unique_ptr<Solver>> solvers_;
};

struct GmresResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  double relative_residual = 1.0;  // true ‖b − A x‖ / ‖b‖
};

// Restarted GMRES with right preconditioning for A x = b from x = 0.
template <class Op, class Prec>
GmresResult gmres(const Op& a_op, const Prec& m_inv, const std::vector<double>& b, double rtol, std::size_t restart,
                  std::size_t max_iter) {
  GmresResult res{std::vector<double>(b.size(), 0.0), 0};
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) {
    res.relative_residual = 0.0;
    return res;
  }
  std::vector<double> r = b;
  std::vector<double> best_x = res.x;
  double best_norm = b_norm;
  double previous_norm = b_norm;
  while (res.iterations < max_iter) {
    const double beta = std::sqrt(dot(r, r));
    if (beta <= rtol * b_norm) break;
    std::vector<std::vector<double>> basis{r};
    for (double& x : basis[0]) x /= beta;
    std::vector<std::vector<double>> hess;
    std::vector<double> cs, sn, g{beta};
    std::size_t k = 0;
    for (; k < restart && res.iterations < max_iter; ++k) {
      ++res.iterations;
      std::vector<double> w = a_op(m_inv(basis[k]));
      std::vector<double> hcol(k + 2, 0.0);
      for (std::size_t i = 0; i <= k; ++i) {
        hcol[i] = dot(w, basis[i]);
        axpy(-hcol[i], basis[i], w);
      }
      hcol[k + 1] = std::sqrt(dot(w, w));
      for (std::size_t i = 0; i < k; ++i) {
        const double t = cs[i] * hcol[i] + sn[i] * hcol[i + 1];
        hcol[i + 1] = -sn[i] * hcol[i] + cs[i] * hcol[i + 1];
        hcol[i] = t;
      }
      const double denom = std::hypot(hcol[k], hcol[k + 1]);
      cs.push_back(denom == 0.0 ? 1.0 : hcol[k] / denom);
      sn.push_back(denom == 0.0 ? 0.0 : hcol[k + 1] / denom);
      const double h_next = hcol[k + 1];
      hcol[k] = denom;
      hcol[k + 1] = 0.0;
      g.push_back(-sn[k] * g[k]);
      g[k] *= cs[k];
      hess.push_back(std::move(hcol));
      if (h_next != 0.0) {
        for (double& x : w) x /= h_next;
      }
      basis.push_back(std::move(w));
      if (std::abs(g[k + 1]) <= rtol * b_norm || h_next == 0.0) {
        ++k;
        break;
      }
    }
    // Back substitution on the triangularized Hessenberg matrix.
    std::vector<double> y(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
      double acc = g[i];
      for (std::size_t l = i + 1; l < k; ++l) acc -= hess[l][i] * y[l];
      y[i] = acc / hess[i][i];
    }
    std::vector<double> z(b.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) axpy(y[i], basis[i], z);
    axpy(1.0, m_inv(z), res.x);
    // The recurrence estimate drifts from the true residual when the
    // preconditioned operator is badly conditioned, so confirm it. Near a
    // converged Newton iterate the finite-difference operator is noisy and
    // the true residual can stall; a cycle that fails to halve it ends the
    // solve with the best iterate seen.
    r = b;
    axpy(-1.0, a_op(res.x), r);
    const double true_norm = std::sqrt(dot(r, r));
    if (true_norm < best_norm) {
      best_x = res.x;
      best_norm = true_norm;
    } else {
      res.x = best_x;
      break;
    }
    if (std::abs(g[k]) <= rtol * b_norm && true_norm <= 2.0 * rtol * b_norm) break;
    if (true_norm > 0.5 * previous_norm) break;
    previous_norm = true_norm;
  }
  res.relative_residual = best_norm / b_norm;
  return res;
}

double default_tau(const CurveField& f) {
  return 0.8 / (2.0 / (f.dx() * f.dx()) + 2.0 / (f.dt() * f.dt()));
}

class Solver {
 public:
  Solver(const BoundaryData& boundary, const SobolevOperator& op, const ForceProfile& force, const SolverConfig& cfg)
      : field_(initial_field(boundary)), op_(op), cfg_(cfg) {
    check_operator(field_, op_);
    fv_ = force.evaluate(field_.n());
    ev_ = evaluate(field_, op_, fv_);
    record();
  }

  BvpSolution relaxation() {
    double tau = cfg_.tau > 0.0 ? cfg_.tau : default_tau(field_);
    report_.initial_tau = tau;
    while (!converged()) {
      next_iteration(tau);
      CurveField trial = step(field_, ev_, tau);
      Evaluation trial_ev = evaluate(trial, op_, fv_);
      if (!(trial_ev.norm <= ev_.norm)) {
        ++report_.halvings;
        tau *= 0.5;
        if (report_.halvings > cfg_.max_halvings) {
          throw NonConvergence("solve_bvp: step size halved " + std::to_string(cfg_.max_halvings) +
                                   " times without reducing the residual",
                               finish(false, tau));
        }
        continue;
      }
      accept(std::move(trial), std::move(trial_ev));
    }
    return finish(true, tau);
  }

  BvpSolution newton() {
    double lambda = 1.0;
    report_.initial_tau = 1.0;
    while (!converged()) {
      next_iteration(lambda);
      const ModePreconditioner prec(field_, op_, fv_);
      const auto g = flatten(ev_.direction);
      const auto c = gather(field_);
      const double c_scale = 1.0 + rms(c);
      auto jacobian = [&](const std::vector<double>& w) {
        const double w_scale = rms(w);
        std::vector<double> out(w.size(), 0.0);
        if (w_scale == 0.0) return out;
        const double eps = 1e-7 * c_scale / w_scale;
        const auto moved = evaluate(displaced(field_, w, eps), op_, fv_);
        out = flatten(moved.direction);
        axpy(-1.0, g, out);
        for (double& x : out) x /= eps;
        return out;
      };
      std::vector<double> rhs = g;
      for (double& x : rhs) x = -x;
      // No need to solve the linear system more accurately than it takes to
      // bring the residual to half the tolerance.
      const double worst = std::max(ev_.rh.max_abs(), ev_.rv.max_abs());
      const double forcing = std::clamp(0.5 * cfg_.tol_res / worst, cfg_.krylov_rtol, 0.5);
      auto sol = gmres(
          jacobian, [&](const std::vector<double>& v) { return prec.apply(v, false); }, rhs, forcing,
          cfg_.krylov_restart, cfg_.max_krylov);
      report_.krylov_iterations += sol.iterations;
      if (sol.relative_residual > 0.5) {
        auto full = gmres(
            jacobian, [&](const std::vector<double>& v) { return prec.apply(v, true); }, rhs, forcing,
            cfg_.krylov_restart, cfg_.max_krylov);
        report_.krylov_iterations += full.iterations;
        if (full.relative_residual < sol.relative_residual) sol = std::move(full);
      }

      const double merit = rms(g);
      lambda = 1.0;
      for (int halvings = 0;; ++halvings) {
        if (halvings > cfg_.max_halvings) {
          throw NonConvergence("solve_bvp: line search failed after " + std::to_string(cfg_.max_halvings) +
                                   " halvings",
                               finish(false, lambda));
        }
        try {
          CurveField trial = displaced(field_, sol.x, lambda);
          Evaluation trial_ev = evaluate(trial, op_, fv_);
          if (rms(flatten(trial_ev.direction)) <= (1.0 - 1e-4 * lambda) * merit) {
            accept(std::move(trial), std::move(trial_ev));
            break;
          }
        } catch (const RegularityError&) {
          // Step leaves the space of regular curves; shorten it.
        }
        ++report_.halvings;
        lambda *= 0.5;
      }
    }
    return finish(true, lambda);
  }

 private:
  bool converged() const { return ev_.rh.max_abs() < cfg_.tol_res && ev_.rv.max_abs() < cfg_.tol_res; }

  void next_iteration(double step_size) {
    if (report_.iterations >= cfg_.max_iter) {
      throw NonConvergence("solve_bvp: residual " + std::to_string(ev_.norm) + " above tolerance after " +
                               std::to_string(report_.iterations) + " iterations",
                           finish(false, step_size));
    }
    ++report_.iterations;
  }

  void accept(CurveField f, Evaluation ev) {
    field_ = std::move(f);
    ev_ = std::move(ev);
    record();
  }

  void record() {
    report_.residual_history.push_back(ev_.norm);
    if (cfg_.track_energy) report_.energy_history.push_back(energy(field_, op_).total);
  }

  BvpSolution finish(bool converged, double step_size) {
    report_.converged = converged;
    report_.final_residual = ev_.norm;
    report_.max_abs_rh = ev_.rh.max_abs();
    report_.max_abs_rv = ev_.rv.max_abs();
    report_.final_tau = step_size;
    return BvpSolution{field_, report_};
  }

  CurveField field_;
  const SobolevOperator& op_;
  SolverConfig cfg_;
  std::vector<double> fv_;
  Evaluation ev_;
  ConvergenceReport report_;
};

}  // namespace

BvpSolution solve_bvp(const BoundaryData& boundary, const SobolevOperator& op, const ForceProfile& force,
                      const SolverConfig& cfg) {
  Solver solver(boundary, op, force, cfg);
  return cfg.method == SolverMethod::relaxation ? solver.relaxation() : solver.newton();
}

double equivariance_check(const BoundaryData& boundary, const std::function<double(double)>& phi,
                          const SobolevOperator& op, const ForceProfile& force, const SolverConfig& cfg) {
  const auto original = solve_bvp(boundary, op, force, cfg);
  const auto moved = solve_bvp(boundary.reparametrized(phi), op, force, cfg);
  const auto& a = original.field;
  const auto& b = moved.field;
  std::vector<double> d(a.node_count(), 0.0);
  parallel_for(a.node_count(), [&](std::size_t k) {
    const std::size_t i = k / (a.mt() + 1);
    const std::size_t j = k % (a.mt() + 1);
    d[k] = shape_distance(a.at(i, j), b.at(i, j));
  });
  return *std::max_element(d.begin(), d.end());
}

}  // namespace unred
