#include "unred_cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "unred/checks.hpp"
#include "unred/curve_io.hpp"
#include "unred/errors.hpp"
#include "unred/hopf.hpp"
#include "unred/hypflow.hpp"
#include "unred/sigma.hpp"
#include "unred/unreduction.hpp"
#include "unred/version.hpp"

namespace unred::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Comma-separated rows with round-trip number formatting.
class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string padded(std::size_t v, int width) {
  std::ostringstream os;
  os << std::setw(width) << std::setfill('0') << v;
  return os.str();
}

// Indices 0, stride, 2·stride, … plus the last one.
std::vector<std::size_t> strided(std::size_t last, std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i <= last; i += stride) out.push_back(i);
  if (out.back() != last) out.push_back(last);
  return out;
}

json vec3(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

struct CurveSummary {
  double mean_radius = 0.0;
  double length = 0.0;
  double min_curvature = 0.0;
  double max_curvature = 0.0;
};

CurveSummary summarize(const DiscreteCurve& c) {
  const auto fr = frenet(c, DerivBackend::spectral);
  Vec2 centre{};
  for (const auto& p : c.samples()) centre = centre + p;
  centre = centre * (1.0 / static_cast<double>(c.size()));
  CurveSummary s;
  for (const auto& p : c.samples()) s.mean_radius += norm(p - centre);
  s.mean_radius /= static_cast<double>(c.size());
  for (double v : fr.speed) s.length += v;
  s.length *= kTwoPi / static_cast<double>(c.size());
  s.min_curvature = *std::min_element(fr.curvature.begin(), fr.curvature.end());
  s.max_curvature = *std::max_element(fr.curvature.begin(), fr.curvature.end());
  return s;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Each command fills `results` and writes its CSV files; failures propagate
// as exceptions after partial results are recorded.
class Command {
 public:
  Command(const RunConfig& cfg, fs::path out, json& results, std::ostream& log)
      : cfg_(cfg), out_(std::move(out)), results_(results), log_(log) {}

  int match() {
    const auto& g = cfg_.geometry;
    const DiscreteCurve bottom = g.bottom.build(g.n);
    const DiscreteCurve top = g.top.build(g.n);
    BoundaryData b;
    b.x_boundary = g.x_boundary;
    b.bottom.assign(g.mx + 1, bottom);
    b.top.assign(g.mx + 1, top);
    if (g.x_boundary == XBoundary::periodic) {
      b.periodic_mt = g.mt;
    } else {
      for (std::size_t j = 0; j <= g.mt; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(g.mt);
        std::vector<Vec2> pts(g.n);
        for (std::size_t q = 0; q < g.n; ++q) pts[q] = (1.0 - t) * bottom[q] + t * top[q];
        b.left.emplace_back(pts);
        b.right.emplace_back(std::move(pts));
      }
    }
    const SobolevOperator op(cfg_.op.a, g.n, cfg_.op.backend);
    int code = kSuccess;
    BvpSolution sol = [&] {
      try {
        return solve_bvp(b, op, cfg_.force, cfg_.solver.to_config());
      } catch (const NonConvergence& e) {
        code = kNonConvergence;
        results_["error"] = e.what();
        return e.partial();
      }
    }();

    const auto& r = sol.report;
    const auto e = energy(sol.field, op);
    results_["converged"] = r.converged;
    results_["iterations"] = r.iterations;
    results_["krylov_iterations"] = r.krylov_iterations;
    results_["residual"] = r.final_residual;
    results_["max_abs_rh"] = r.max_abs_rh;
    results_["max_abs_rv"] = r.max_abs_rv;
    results_["halvings"] = r.halvings;
    results_["energy"] = {{"total", e.total}, {"horizontal", e.horizontal}, {"vertical", e.vertical}};

    std::vector<std::string> header{"iteration", "residual"};
    if (!r.energy_history.empty()) header.push_back("energy");
    Csv plot(out_ / "plotdata.csv", header);
    for (std::size_t k = 0; k < r.residual_history.size(); ++k) {
      std::vector<double> row{static_cast<double>(k), r.residual_history[k]};
      if (!r.energy_history.empty()) row.push_back(r.energy_history[k]);
      plot.row(row);
    }
    const auto& f = sol.field;
    for (std::size_t i : strided(f.mx(), cfg_.output.stride)) {
      for (std::size_t j : strided(f.mt(), cfg_.output.stride)) {
        write_curve_csv(out_ / "snapshots" / ("node_i" + padded(i, 3) + "_j" + padded(j, 3) + ".csv"), f.at(i, j));
      }
    }
    log_ << "match: " << (r.converged ? "converged" : "not converged") << " after " << r.iterations
         << " iterations, residual " << r.final_residual << '\n';
    return code;
  }

  int flow() {
    const auto& g = cfg_.geometry;
    const auto& fl = cfg_.flow;
    FlowState init{g.initial.build(g.n), std::vector<double>(g.n, fl.h0), std::vector<double>(g.n, fl.v0), 0.0};
    FlowOptions opts;
    opts.backend = fl.backend;
    opts.kappa_max = fl.kappa_max;
    opts.resample_every = fl.resample_every;
    opts.save_stride = cfg_.output.stride;
    const Trajectory traj = integrate(init, cfg_.force, fl.final_time, fl.dt, opts);

    Csv plot(out_ / "plotdata.csv",
             {"time", "mean_radius", "length", "min_curvature", "max_curvature", "max_abs_h", "max_abs_v"});
    for (std::size_t k = 0; k < traj.frames.size(); ++k) {
      const auto& s = traj.frames[k];
      const auto sum = summarize(s.curve);
      plot.row({s.time, sum.mean_radius, sum.length, sum.min_curvature, sum.max_curvature, max_abs(s.h), max_abs(s.v)});
      Csv snap(out_ / "snapshots" / ("frame_" + padded(k, 5) + ".csv"), {"theta", "x", "y", "h", "v"});
      for (std::size_t q = 0; q < s.curve.size(); ++q) {
        snap.row({s.curve.theta(q), s.curve[q].x, s.curve[q].y, s.h[q], s.v[q]});
      }
    }

    const auto& last = traj.frames.back();
    const auto sum = summarize(last.curve);
    results_["stop_reason"] = to_string(traj.stop);
    results_["last_valid_time"] = traj.last_valid_time;
    results_["steps"] = traj.steps;
    results_["frames"] = traj.frames.size();
    results_["final"] = {{"mean_radius", sum.mean_radius},
                         {"length", sum.length},
                         {"max_abs_h", max_abs(last.h)},
                         {"max_abs_v", max_abs(last.v)}};

    // Circles with uniform normal speed and no tangential motion reduce to
    // two ODEs; report the deviation from that reference.
    const bool circular = g.initial.shape == "circle" && g.initial.phi_amplitude == 0.0 && fl.v0 == 0.0 &&
                          cfg_.force.kind == ForceProfile::Kind::zero;
    if (circular) {
      try {
        const auto ref = circle_reduction_oracle(g.initial.radius, fl.h0, last.time);
        double dh = 0.0;
        for (double h : last.h) dh = std::max(dh, std::abs(h - ref.h));
        results_["circle_reference"] = {{"radius", ref.radius},
                                        {"h", ref.h},
                                        {"radius_error", std::abs(sum.mean_radius - ref.radius)},
                                        {"h_error", dh}};
      } catch (const SingularityStop& e) {
        results_["circle_reference"] = {{"error", e.what()}};
      }
    }
    log_ << "flow: " << to_string(traj.stop) << " at t = " << traj.last_valid_time << " after " << traj.steps
         << " steps\n";
    if (traj.stop != StopReason::completed) {
      results_["error"] = "flow stopped early: " + to_string(traj.stop);
      return kNumericalError;
    }
    return kSuccess;
  }

  int hopf() {
    const auto& hp = cfg_.hopf;
    const double h = hp.height;
    const double r = std::sqrt(1.0 - h * h);
    auto make_path = [&](std::size_t k) {
      if (hp.path == "great_circle") return SpherePath::great_circle(k);
      return SpherePath::sample(k, [h, r](double th) { return Vec3{h, r * std::cos(th), r * std::sin(th)}; });
    };
    auto make_sigma = [&](std::size_t k) {
      if (hp.sigma_kind == "vertical_ode") return vertical_ode(hp.sigma, hp.sigma0, k);
      return VerticalProfile::sample(k, hp.sigma);
    };

    Csv plot(out_ / "plotdata.csv", {"K", "phase", "closure_error", "sigma_integral", "max_projection_error"});
    json runs = json::array();
    LiftResult last;
    for (std::size_t k : hp.k_values) {
      const SpherePath path = make_path(k);
      const VerticalProfile sigma = make_sigma(k);
      last = horizontal_lift(path, sigma, canonical_lift(path.samples().front()));
      const double integral = sigma.integral();
      plot.row({static_cast<double>(k), last.holonomy.phase, last.holonomy.closure_error, integral,
                last.max_projection_error});
      runs.push_back({{"K", k},
                      {"phase", last.holonomy.phase},
                      {"closure_error", last.holonomy.closure_error},
                      {"sigma_integral", integral}});
    }
    results_["runs"] = runs;
    results_["phase"] = last.holonomy.phase;
    results_["closure_error"] = last.holonomy.closure_error;
    results_["max_projection_error"] = last.max_projection_error;

    const std::size_t k = hp.k_values.back();
    Csv snap(out_ / "snapshots" / "lift.csv", {"theta", "w", "x", "y", "z", "p1", "p2", "p3"});
    for (std::size_t m : strided(k, cfg_.output.stride)) {
      const auto& s = last.path[m];
      const Vec3 p = hopf_project(normalized(s));
      snap.row({kTwoPi * static_cast<double>(m) / static_cast<double>(k), s.w, s.x, s.y, s.z, p.x, p.y, p.z});
    }
    log_ << "hopf: phase " << last.holonomy.phase << " at K = " << k << ", closure error "
         << last.holonomy.closure_error << '\n';
    return kSuccess;
  }

  int sigma() {
    const auto& sm = cfg_.sigma;
    const LieValue st{{sm.sigma_t[0], sm.sigma_t[1], sm.sigma_t[2]}};
    const LieValue sx{{sm.sigma_x[0], sm.sigma_x[1], sm.sigma_x[2]}};
    const LieField field = LieField::constant(sm.mx, sm.mt, st, sx);
    const auto ep = ep_residual(field);
    const auto flat = flatness_residual(field);
    results_["ep_residual_max"] = ep.max_norm();
    results_["ep_residual_centre"] = vec3(ep.at(sm.mx / 2, sm.mt / 2).c);
    results_["flatness_residual_max"] = flat.max_norm();

    const Reconstruction rec = reconstruct(field, UnitQuaternion{});
    results_["path_disagreement"] = rec.path_disagreement;
    std::vector<Vec3> pts;
    Csv plot(out_ / "plotdata.csv", {"t", "p1", "p2", "p3"});
    for (std::size_t j = 0; j <= sm.mt; ++j) {
      pts.push_back(coset_project(rec.at(0, j)));
      plot.row({field.dt() * static_cast<double>(j), pts.back().x, pts.back().y, pts.back().z});
    }
    results_["geodesic_residual"] = geodesic_residual(pts, field.dt());

    Csv snap(out_ / "snapshots" / "group.csv", {"x", "t", "w", "qx", "qy", "qz"});
    for (std::size_t i : strided(sm.mx, cfg_.output.stride)) {
      for (std::size_t j : strided(sm.mt, cfg_.output.stride)) {
        const auto& q = rec.at(i, j);
        snap.row({field.dx() * static_cast<double>(i), field.dt() * static_cast<double>(j), q.w, q.x, q.y, q.z});
      }
    }
    log_ << "sigma: EP residual " << ep.max_norm() << ", flatness residual " << flat.max_norm()
         << ", path disagreement " << rec.path_disagreement << '\n';
    return kSuccess;
  }

  int check() {
    const auto checks = run_builtin_checks();
    std::ofstream csv(out_ / "plotdata.csv");
    csv << "module,name,passed,value,tolerance\n";
    json failed = json::array();
    std::size_t passed = 0;
    for (const auto& c : checks) {
      csv << c.module << ',' << c.name << ',' << (c.passed ? 1 : 0) << ',' << format_double(c.value) << ','
          << format_double(c.tolerance) << '\n';
      log_ << (c.passed ? "PASS " : "FAIL ") << c.module << ": " << c.name << " (" << c.value << ", tol "
           << c.tolerance << ")" << (c.detail.empty() ? "" : " " + c.detail) << '\n';
      if (c.passed) {
        ++passed;
      } else {
        failed.push_back(c.module + ": " + c.name);
      }
    }
    results_["checks"] = checks.size();
    results_["passed"] = passed;
    results_["failed"] = failed;
    return failed.empty() ? kSuccess : kChecksFailed;
  }

 private:
  const RunConfig& cfg_;
  fs::path out_;
  json& results_;
  std::ostream& log_;
};

}  // namespace

int run(const std::string& command, const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg = config;
  cfg.command = command;
  cfg.output.directory = out.string();

  fs::create_directories(out / "snapshots");
  json results = json::object();
  int code = kSuccess;
  std::string status = "ok";
  try {
    if (!reductive_identity_holds()) throw Error("structure constants fail the reductive identity [e3, m] in m");
    Command cmd(cfg, out, results, log);
    if (command == "match") code = cmd.match();
    else if (command == "flow") code = cmd.flow();
    else if (command == "hopf") code = cmd.hopf();
    else if (command == "sigma") code = cmd.sigma();
    else if (command == "check") code = cmd.check();
    else throw ConfigError({"unknown command '" + command + "'"});
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    results["error"] = e.what();
    code = kNumericalError;
    log << "error: " << e.what() << '\n';
  }
  switch (code) {
    case kSuccess: status = "ok"; break;
    case kChecksFailed: status = "checks_failed"; break;
    case kNonConvergence: status = "non_convergence"; break;
    default: status = "numerical_error"; break;
  }

  json versions = json::object();
  for (const auto& [name, version] : build_versions()) versions[name] = version;
  json manifest;
  manifest["command"] = command;
  manifest["status"] = status;
  manifest["exit_code"] = code;
  manifest["config"] = cfg.to_json();
  manifest["versions"] = versions;
  manifest["results"] = results;
  manifest["timings"] = {
      {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  std::ofstream(out / "manifest.json") << manifest.dump(2) << '\n';
  return code;
}

}  // namespace unred::cli
