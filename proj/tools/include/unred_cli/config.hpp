#pragma once

// Run configuration for the `unred` command line: one JSON document with
// optional sections. Every section has defaults, so a config only needs to
// state what differs from them.

#include <array>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "unred/curve.hpp"
#include "unred/force.hpp"
#include "unred/hypflow.hpp"
#include "unred/sobolev.hpp"
#include "unred/unreduction.hpp"

namespace unred::cli {

/// Carries every diagnostic found while checking a config.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

inline const std::vector<std::string> kCommands{"match", "flow", "hopf", "sigma", "check"};

/// Built-in closed curve: circle(R) or ellipse(a, b), optionally composed with
/// θ ↦ θ + ε sin θ (|ε| < 1 keeps it a diffeomorphism).
struct ShapeSpec {
  std::string shape = "circle";
  double radius = 1.0;
  double a = 1.0;
  double b = 1.0;
  double phi_amplitude = 0.0;

  DiscreteCurve build(std::size_t n) const;
};

struct GeometrySpec {
  std::size_t n = 64;
  std::size_t mx = 8;
  std::size_t mt = 8;
  XBoundary x_boundary = XBoundary::dirichlet;
  ShapeSpec bottom{};                            // match: curve at t = 0
  ShapeSpec top{"circle", 2.0, 1.0, 1.0, 0.0};  // match: curve at t = 1
  ShapeSpec initial{};                           // flow: initial curve
};

struct OperatorSpec {
  double a = 0.1;
  SobolevBackend backend = SobolevBackend::spectral;
};

struct SolverSpec {
  SolverMethod method = SolverMethod::newton_krylov;
  double tau = 0.0;
  double tol_res = 1e-8;
  std::size_t max_iter = 100000;
  bool track_energy = true;

  SolverConfig to_config() const;
};

struct FlowSpec {
  double final_time = 0.5;
  double dt = 1e-3;
  double h0 = 0.0;
  double v0 = 0.0;
  double kappa_max = 1e3;
  std::size_t resample_every = 0;
  DerivBackend backend = DerivBackend::spectral;
};

/// f(θ) = c0 + Σ_k sin[k−1]·sin kθ + cos[k−1]·cos kθ.
struct SeriesSpec {
  double c0 = 0.0;
  std::vector<double> sin;
  std::vector<double> cos;

  double operator()(double theta) const;
};

struct HopfSpec {
  std::vector<std::size_t> k_values{10000};
  std::string path = "great_circle";  // or "latitude"
  double height = 0.0;                // latitude circle at x₁ = height
  std::string sigma_kind = "series";  // or "vertical_ode"
  SeriesSpec sigma{};                 // ς itself (series) or f^v (vertical_ode)
  double sigma0 = 0.0;                // ς(0) for vertical_ode
};

struct SigmaSpec {
  std::size_t mx = 16;
  std::size_t mt = 16;
  std::array<double, 3> sigma_t{0.0, 0.0, 1.0};
  std::array<double, 3> sigma_x{0.0, 0.0, 0.0};
};

struct OutputSpec {
  std::string directory = "out";
  std::size_t stride = 1;
};

struct RunConfig {
  std::string command;  // empty when the document does not name one
  GeometrySpec geometry;
  OperatorSpec op;
  ForceProfile force;
  SolverSpec solver;
  FlowSpec flow;
  HopfSpec hopf;
  SigmaSpec sigma;
  OutputSpec output;

  /// Canonical JSON echo with every default filled in.
  nlohmann::json to_json() const;
};

/// Checks the whole document and collects every violation before throwing.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a config file. Throws ConfigError for unreadable files,
/// malformed JSON, and schema violations.
RunConfig load_config(const std::filesystem::path& path);

/// All diagnostics for a config file; empty when it is valid.
std::vector<std::string> validate_file(const std::filesystem::path& path);

}  // namespace unred::cli
