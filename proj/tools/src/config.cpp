#include "unred_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>

namespace unred::cli {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

namespace {

// Integers built in code arrive signed; integers read from text arrive unsigned.
bool is_count(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Walks one JSON object, records type errors against a dotted path, and
// reports keys nobody asked for.
class Section {
 public:
  Section(const json* obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (obj_ != nullptr && !obj_->is_object()) {
      error(path_ + " must be an object");
      obj_ = nullptr;
    }
  }

  ~Section() {
    if (obj_ == nullptr) return;
    for (const auto& [key, value] : obj_->items()) {
      if (used_.count(key) == 0) error(name(key) + " is not a recognised setting");
    }
  }

  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  void error(std::string msg) { errors_.push_back(std::move(msg)); }

  Section child(const std::string& key) { return Section(find(key), name(key), errors_); }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) {
        out = v->get<double>();
        if (!std::isfinite(out)) error(name(key) + " must be finite");
      } else {
        error(name(key) + " must be a number");
      }
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (is_count(*v)) {
        out = v->get<std::size_t>();
      } else {
        error(name(key) + " must be a non-negative integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        error(name(key) + " must be true or false");
      }
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        error(name(key) + " must be a string");
      }
    }
  }

  template <class T>
  void choice(const std::string& key, T& out, const std::vector<std::pair<std::string, T>>& options) {
    const json* v = find(key);
    if (v == nullptr) return;
    std::string list;
    for (const auto& [label, value] : options) {
      if (v->is_string() && v->get<std::string>() == label) {
        out = value;
        return;
      }
      list += (list.empty() ? "" : ", ") + label;
    }
    error(name(key) + " must be one of: " + list);
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (!v->is_array()) {
      error(name(key) + " must be an array of numbers");
      return;
    }
    out.clear();
    for (const auto& x : *v) {
      if (!x.is_number()) {
        error(name(key) + " must be an array of numbers");
        return;
      }
      out.push_back(x.get<double>());
    }
  }

  bool has(const std::string& key) const { return obj_ != nullptr && obj_->contains(key); }

  /// The value under key, marked as used; nullptr when absent.
  const json* raw(const std::string& key) { return find(key); }

 private:
  const json* find(const std::string& key) {
    if (obj_ == nullptr) return nullptr;
    used_.insert(key);
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  const json* obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

void read_shape(Section s, ShapeSpec& shape) {
  s.choice<std::string>("shape", shape.shape, {{"circle", "circle"}, {"ellipse", "ellipse"}});
  s.number("R", shape.radius);
  s.number("a", shape.a);
  s.number("b", shape.b);
  s.number("phi_amplitude", shape.phi_amplitude);
  if (shape.shape == "circle" && !(shape.radius > 0.0)) s.error(s.name("R") + " must be > 0");
  if (shape.shape == "ellipse" && !(shape.a > 0.0 && shape.b > 0.0)) s.error(s.name("a") + " and b must be > 0");
  if (!(std::abs(shape.phi_amplitude) < 1.0)) s.error(s.name("phi_amplitude") + " must lie in (-1, 1)");
}

void read_series(Section& s, SeriesSpec& series) {
  s.number("c0", series.c0);
  s.numbers("sin", series.sin);
  s.numbers("cos", series.cos);
}

json shape_json(const ShapeSpec& s) {
  json j{{"shape", s.shape}, {"phi_amplitude", s.phi_amplitude}};
  if (s.shape == "circle") {
    j["R"] = s.radius;
  } else {
    j["a"] = s.a;
    j["b"] = s.b;
  }
  return j;
}

}  // namespace

DiscreteCurve ShapeSpec::build(std::size_t n) const {
  DiscreteCurve c = shape == "ellipse" ? shapes::ellipse(n, a, b) : shapes::circle(n, radius);
  if (phi_amplitude == 0.0) return c;
  const double eps = phi_amplitude;
  return reparametrize(c, [eps](double th) { return th + eps * std::sin(th); });
}

SolverConfig SolverSpec::to_config() const {
  SolverConfig cfg;
  cfg.method = method;
  cfg.tau = tau;
  cfg.tol_res = tol_res;
  cfg.max_iter = max_iter;
  cfg.track_energy = track_energy;
  return cfg;
}

double SeriesSpec::operator()(double theta) const {
  double f = c0;
  for (std::size_t k = 0; k < sin.size(); ++k) f += sin[k] * std::sin(static_cast<double>(k + 1) * theta);
  for (std::size_t k = 0; k < cos.size(); ++k) f += cos[k] * std::cos(static_cast<double>(k + 1) * theta);
  return f;
}

RunConfig parse_config(const json& doc) {
  std::vector<std::string> errors;
  RunConfig cfg;
  {
    Section root(&doc, "", errors);

    root.text("command", cfg.command);
    if (root.has("command") && std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
      root.error("command must be one of: match, flow, hopf, sigma, check");
    }

    {
      Section g = root.child("geometry");
      auto& geo = cfg.geometry;
      g.count("N", geo.n);
      g.count("Mx", geo.mx);
      g.count("Mt", geo.mt);
      g.choice<XBoundary>("x_boundary", geo.x_boundary,
                          {{"dirichlet", XBoundary::dirichlet}, {"periodic", XBoundary::periodic}});
      if (geo.n % 2 != 0 || geo.n < 8) {
        g.error("geometry.N must be even and ≥ 8 (got " + std::to_string(geo.n) + ")");
      }
      if (geo.mx < 2) g.error("geometry.Mx must be ≥ 2");
      if (geo.mt < 2) g.error("geometry.Mt must be ≥ 2");
      read_shape(g.child("bottom"), geo.bottom);
      read_shape(g.child("top"), geo.top);
      read_shape(g.child("initial"), geo.initial);
    }

    {
      Section o = root.child("operator");
      o.number("A", cfg.op.a);
      o.choice<SobolevBackend>("backend", cfg.op.backend,
                               {{"spectral", SobolevBackend::spectral}, {"tridiagonal", SobolevBackend::tridiagonal}});
      if (!(cfg.op.a >= 0.0)) o.error("operator.A must be ≥ 0");
    }

    {
      Section f = root.child("force");
      f.choice<ForceProfile::Kind>("kind", cfg.force.kind,
                                   {{"zero", ForceProfile::Kind::zero},
                                    {"constant", ForceProfile::Kind::constant},
                                    {"sinusoidal", ForceProfile::Kind::sinusoidal}});
      f.number("amplitude", cfg.force.amplitude);
      std::size_t freq = 0;
      f.count("frequency", freq);
      cfg.force.frequency = static_cast<int>(freq);
      if (cfg.force.kind == ForceProfile::Kind::sinusoidal && freq == 0) {
        f.error("force.frequency must be ≥ 1 for a sinusoidal force");
      }
    }

    {
      Section s = root.child("solver");
      auto& sv = cfg.solver;
      s.choice<SolverMethod>("method", sv.method,
                             {{"newton_krylov", SolverMethod::newton_krylov}, {"relaxation", SolverMethod::relaxation}});
      s.number("tau", sv.tau);
      s.number("tol_res", sv.tol_res);
      s.count("max_iter", sv.max_iter);
      s.boolean("track_energy", sv.track_energy);
      if (!(sv.tol_res > 0.0)) s.error("solver.tol_res must be > 0");
      if (!(sv.tau >= 0.0)) s.error("solver.tau must be ≥ 0 (0 selects the default step)");
      if (sv.max_iter < 1) s.error("solver.max_iter must be ≥ 1");
    }

    {
      Section s = root.child("flow");
      auto& fl = cfg.flow;
      s.number("T", fl.final_time);
      s.number("dt", fl.dt);
      s.number("h0", fl.h0);
      s.number("v0", fl.v0);
      s.number("kappa_max", fl.kappa_max);
      s.count("resample_every", fl.resample_every);
      s.choice<DerivBackend>("backend", fl.backend,
                             {{"spectral", DerivBackend::spectral},
                              {"central_difference", DerivBackend::central_difference}});
      if (!(fl.final_time >= 0.0)) s.error("flow.T must be ≥ 0");
      if (!(fl.dt > 0.0)) s.error("flow.dt must be > 0");
      if (!(fl.kappa_max > 0.0)) s.error("flow.kappa_max must be > 0");
    }

    {
      Section s = root.child("hopf");
      auto& hp = cfg.hopf;
      if (const json* k = s.raw("K")) {
        std::vector<std::size_t> values;
        bool ok = is_count(*k) || (k->is_array() && !k->empty());
        if (is_count(*k)) {
          values.push_back(k->get<std::size_t>());
        } else if (ok) {
          for (const auto& x : *k) {
            ok = ok && is_count(x);
            if (ok) values.push_back(x.get<std::size_t>());
          }
        }
        if (ok) {
          hp.k_values = std::move(values);
        } else {
          s.error("hopf.K must be a positive integer or a non-empty array of them");
        }
      }
      for (std::size_t k : hp.k_values) {
        if (k < 4) {
          s.error("hopf.K values must be ≥ 4 (got " + std::to_string(k) + ")");
          break;
        }
      }
      s.choice<std::string>("path", hp.path, {{"great_circle", "great_circle"}, {"latitude", "latitude"}});
      s.number("height", hp.height);
      if (!(std::abs(hp.height) < 1.0)) s.error("hopf.height must lie in (-1, 1)");
      Section sg = s.child("sigma");
      sg.choice<std::string>("kind", hp.sigma_kind, {{"series", "series"}, {"vertical_ode", "vertical_ode"}});
      read_series(sg, hp.sigma);
      sg.number("sigma0", hp.sigma0);
      if (hp.sigma_kind == "vertical_ode" && hp.sigma.c0 != 0.0) {
        sg.error("hopf.sigma.c0 must be 0 for vertical_ode (a mean force makes ς non-periodic)");
      }
    }

    {
      Section s = root.child("sigma");
      auto& sm = cfg.sigma;
      s.count("Mx", sm.mx);
      s.count("Mt", sm.mt);
      for (const auto& [key, target] : {std::pair{"sigma_t", &sm.sigma_t}, std::pair{"sigma_x", &sm.sigma_x}}) {
        std::vector<double> v(target->begin(), target->end());
        s.numbers(key, v);
        if (v.size() != 3) {
          s.error(s.name(key) + " must have 3 components");
        } else {
          std::copy(v.begin(), v.end(), target->begin());
        }
      }
      if (sm.mx < 2) s.error("sigma.Mx must be ≥ 2");
      if (sm.mt < 2) s.error("sigma.Mt must be ≥ 2");
    }

    {
      Section s = root.child("output");
      s.text("directory", cfg.output.directory);
      s.count("stride", cfg.output.stride);
      if (cfg.output.directory.empty()) s.error("output.directory must not be empty");
      if (cfg.output.stride < 1) s.error("output.stride must be ≥ 1");
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"malformed JSON in " + path.string() + ": " + e.what()});
  }
  return parse_config(doc);
}

std::vector<std::string> validate_file(const std::filesystem::path& path) {
  try {
    load_config(path);
  } catch (const ConfigError& e) {
    return e.diagnostics();
  }
  return {};
}

json RunConfig::to_json() const {
  auto boundary = [](XBoundary b) { return b == XBoundary::periodic ? "periodic" : "dirichlet"; };
  json j;
  if (!command.empty()) j["command"] = command;
  j["geometry"] = {{"N", geometry.n},
                   {"Mx", geometry.mx},
                   {"Mt", geometry.mt},
                   {"x_boundary", boundary(geometry.x_boundary)},
                   {"bottom", shape_json(geometry.bottom)},
                   {"top", shape_json(geometry.top)},
                   {"initial", shape_json(geometry.initial)}};
  j["operator"] = {{"A", op.a}, {"backend", op.backend == SobolevBackend::spectral ? "spectral" : "tridiagonal"}};
  j["force"] = {{"kind", to_string(force.kind)}, {"amplitude", force.amplitude}, {"frequency", force.frequency}};
  j["solver"] = {{"method", solver.method == SolverMethod::newton_krylov ? "newton_krylov" : "relaxation"},
                 {"tau", solver.tau},
                 {"tol_res", solver.tol_res},
                 {"max_iter", solver.max_iter},
                 {"track_energy", solver.track_energy}};
  j["flow"] = {{"T", flow.final_time},
               {"dt", flow.dt},
               {"h0", flow.h0},
               {"v0", flow.v0},
               {"kappa_max", flow.kappa_max},
               {"resample_every", flow.resample_every},
               {"backend", flow.backend == DerivBackend::spectral ? "spectral" : "central_difference"}};
  j["hopf"] = {{"K", hopf.k_values},
               {"path", hopf.path},
               {"height", hopf.height},
               {"sigma",
                {{"kind", hopf.sigma_kind},
                 {"c0", hopf.sigma.c0},
                 {"sin", hopf.sigma.sin},
                 {"cos", hopf.sigma.cos},
                 {"sigma0", hopf.sigma0}}}};
  j["sigma"] = {{"Mx", sigma.mx}, {"Mt", sigma.mt}, {"sigma_t", sigma.sigma_t}, {"sigma_x", sigma.sigma_x}};
  j["output"] = {{"directory", output.directory}, {"stride", output.stride}};
  return j;
}

}  // namespace unred::cli
