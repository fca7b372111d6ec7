#include "unred/checks.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

#include "unred/curve.hpp"
#include "unred/curve_io.hpp"
#include "unred/hopf.hpp"
#include "unred/hypflow.hpp"
#include "unred/sigma.hpp"
#include "unred/sobolev.hpp"
#include "unred/spectral.hpp"
#include "unred/unreduction.hpp"

namespace unred {
namespace {

double angular_distance(double a, double b) {
  const double d = std::remainder(a - b, kTwoPi);
  return std::abs(d);
}

struct Suite {
  std::vector<CheckResult> results;

  // `measure` returns the quantity that must not exceed `tol`.
  void add(std::string module, std::string name, double tol, const std::function<double()>& measure) {
    CheckResult r{std::move(module), std::move(name), false, 0.0, tol, {}};
    try {
      r.value = measure();
      r.passed = std::isfinite(r.value) && r.value <= tol;
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  }
};

void curvegeo_checks(Suite& s) {
  s.add("curvegeo", "circle curvature equals 1/R", 1e-10, [] {
    const auto fr = frenet(shapes::circle(64, 2.0));
    double err = 0.0;
    for (double k : fr.curvature) err = std::max(err, std::abs(k - 0.5));
    return err;
  });
  s.add("curvegeo", "total turning of an ellipse is 2 pi", 1e-10,
        [] { return std::abs(total_turning(frenet(shapes::ellipse(128, 2.0, 1.0))) - kTwoPi); });
  s.add("curvegeo", "reparametrization leaves the shape unchanged", 1e-6, [] {
    const auto c = shapes::ellipse(128, 2.0, 1.0);
    const auto r = reparametrize(c, [](double t) { return t + 0.3 * std::sin(t); });
    return shape_distance(c, r);
  });
  s.add("curvegeo", "csv round trip is exact", 0.0, [] {
    const auto c = shapes::rounded_square(64);
    std::stringstream ss;
    write_curve_csv(ss, c);
    const auto back = read_curve_csv(ss);
    double err = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) err = std::max(err, norm(back[j] - c[j]));
    return err;
  });
}

void sobolev_checks(Suite& s) {
  s.add("sobolev", "spectrum of P on sin(k theta)", 1e-10, [] {
    const std::size_t n = 128;
    const double a = 0.1;
    const SobolevOperator op(a, n);
    const auto th = spectral::grid(n);
    double err = 0.0;
    for (std::size_t k = 1; k <= n / 4; ++k) {
      const double kd = static_cast<double>(k);
      std::vector<double> f(n);
      for (std::size_t j = 0; j < n; ++j) f[j] = std::sin(kd * th[j]);
      const auto pf = op.apply(f);
      const double lambda = 1.0 + a * a * kd * kd;
      for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(pf[j] - lambda * f[j]) / lambda);
    }
    return err;
  });
  s.add("sobolev", "solve inverts apply", 1e-10, [] {
    const std::size_t n = 128;
    const auto th = spectral::grid(n);
    std::vector<double> f(n);
    for (std::size_t j = 0; j < n; ++j) f[j] = std::exp(std::cos(th[j])) + 0.3 * std::sin(5 * th[j]);
    double err = 0.0;
    for (auto backend : {SobolevBackend::spectral, SobolevBackend::tridiagonal}) {
      const SobolevOperator op(0.2, n, backend);
      const auto back = op.solve(op.apply(f));
      for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(back[j] - f[j]));
    }
    return err;
  });
}

void unreduction_checks(Suite& s) {
  s.add("unreduction", "constant circle field is an exact solution", 1e-12, [] {
    const auto c = shapes::circle(32);
    const auto field = CurveField::constant(4, 4, c);
    const SobolevOperator op(0.1, 32);
    const auto sol = solve_bvp(BoundaryData::of(field), op, ForceProfile::zero());
    return sol.report.iterations <= 1 ? sol.report.final_residual : 1.0;
  });
}

void hypflow_checks(Suite& s) {
  s.add("hypflow", "tangential speed stays zero without force", 0.0, [] {
    const FlowState st{shapes::ellipse(64, 1.5, 1.0), std::vector<double>(64, 0.0), std::vector<double>(64, 0.0), 0.0};
    const auto traj = integrate(st, ForceProfile::zero(), 0.05, 1e-3);
    double worst = 0.0;
    for (const auto& f : traj.frames) {
      for (double v : f.v) worst = std::max(worst, std::abs(v));
    }
    return worst;
  });
  s.add("hypflow", "circle flow matches the radial reduction", 1e-6, [] {
    const std::size_t n = 64;
    const FlowState st{shapes::circle(n), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
    const auto traj = integrate(st, ForceProfile::zero(), 0.1, 1e-3);
    const auto ref = circle_reduction_oracle(1.0, 0.0, 0.1);
    const auto& last = traj.frames.back();
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      err = std::max(err, std::abs(norm(last.curve[j]) - ref.radius));
      err = std::max(err, std::abs(last.h[j] - ref.h));
    }
    return err;
  });
}

void hopf_checks(Suite& s) {
  s.add("hopf", "great-circle holonomy is pi", 1e-6, [] {
    const std::size_t k = 2000;
    return angular_distance(holonomy(SpherePath::great_circle(k), VerticalProfile::constant(k, 0.0)).phase, kPi);
  });
  s.add("hopf", "sin(theta) - 1/2 cancels the holonomy", 1e-6, [] {
    const std::size_t k = 2000;
    const auto sigma = vertical_ode([](double t) { return std::cos(t); }, -0.5, k);
    const auto h = holonomy(SpherePath::great_circle(k), sigma);
    return std::max(angular_distance(h.phase, 0.0), h.closure_error);
  });
  s.add("hopf", "projection is constant on fibres", 1e-12, [] {
    double err = 0.0;
    for (int m = 0; m < 16; ++m) {
      const double a = 0.37 * m;
      const auto q = normalized(Quaternion{std::cos(a), std::sin(2 * a), 0.3, std::cos(3 * a)});
      const auto p = hopf_project(q);
      const auto r = hopf_project(normalized(q * Quaternion{std::cos(a + 1), std::sin(a + 1), 0, 0}));
      err = std::max(err, norm(p - r));
    }
    return err;
  });
}

void sigma_checks(Suite& s) {
  s.add("sigma", "reductive identity [e3, m] in m", 0.0, [] { return reductive_identity_holds() ? 0.0 : 1.0; });
  s.add("sigma", "bracket case residual equals 2 alpha beta e2", 1e-12, [] {
    const double alpha = 0.7, beta = -1.3;
    const auto f = LieField::constant(6, 6, LieValue{{beta, 0, alpha}}, LieValue{});
    const auto r = ep_residual(f);
    double err = 0.0;
    for (std::size_t i = 1; i < 6; ++i) {
      for (std::size_t j = 1; j < 6; ++j) err = std::max(err, norm(r.at(i, j) - LieValue{{0, 2 * alpha * beta, 0}}));
    }
    return err;
  });
  s.add("sigma", "exp field reconstructs path independently", 1e-6, [] {
    const LieValue xi{{0.4, -0.2, 0.0}};
    return reconstruct(LieField::constant(8, 8, xi, xi), Quaternion{}).path_disagreement;
  });
}

}  // namespace

std::vector<CheckResult> run_builtin_checks() {
  Suite s;
  curvegeo_checks(s);
  sobolev_checks(s);
  unreduction_checks(s);
  hypflow_checks(s);
  hopf_checks(s);
  sigma_checks(s);
  return std::move(s.results);
}

}  // namespace unred
