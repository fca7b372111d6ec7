#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "unred_cli/config.hpp"
#include "unred_cli/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace unred::cli;

namespace {

const fs::path kConfigs{UNRED_CONFIG_DIR};
const fs::path kScratch{UNRED_SCRATCH_DIR};

std::vector<std::string> diagnostics_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.diagnostics();
  }
  return {};
}

bool mentions(const std::vector<std::string>& diags, const std::string& text) {
  return std::any_of(diags.begin(), diags.end(), [&](const std::string& d) { return d.find(text) != std::string::npos; });
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

int run_config(const std::string& name, const fs::path& out, RunConfig* adjusted = nullptr) {
  RunConfig cfg = adjusted ? *adjusted : load_config(kConfigs / (name + ".json"));
  fs::remove_all(out);
  std::ostringstream log;
  return run(cfg.command, cfg, out, log);
}

}  // namespace

TEST_CASE("defaults parse and echo round-trips") {
  const auto cfg = parse_config(json::object());
  CHECK(cfg.command.empty());
  CHECK(cfg.geometry.n == 64);
  CHECK(cfg.op.a == doctest::Approx(0.1));
  const auto again = parse_config(cfg.to_json());
  CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("every violation in a document is reported") {
  const json doc = {{"geometry", {{"N", 63}, {"Mx", 1}}},
                    {"operator", {{"A", -0.5}}},
                    {"solver", {{"tol_res", 0.0}}},
                    {"colour", "blue"}};
  const auto diags = diagnostics_of(doc);
  CHECK(diags.size() >= 5);
  CHECK(mentions(diags, "geometry.N must be even and ≥ 8 (got 63)"));
  CHECK(mentions(diags, "geometry.Mx must be ≥ 2"));
  CHECK(mentions(diags, "operator.A must be ≥ 0"));
  CHECK(mentions(diags, "solver.tol_res must be > 0"));
  CHECK(mentions(diags, "colour is not a recognised setting"));

  CHECK(mentions(diagnostics_of({{"command", "solve"}}), "command must be one of"));
  CHECK(mentions(diagnostics_of({{"geometry", {{"N", "64"}}}}), "must be a non-negative integer"));
  CHECK(mentions(diagnostics_of({{"hopf", {{"K", {2}}}}}), "hopf.K values must be ≥ 4 (got 2)"));
  CHECK(mentions(diagnostics_of({{"geometry", {{"top", {{"shape", "ellipse"}, {"a", 0.0}}}}}}), "must be > 0"));
}

TEST_CASE("files that cannot be read or parsed are config errors") {
  fs::create_directories(kScratch);
  const auto broken = kScratch / "not_json.json";
  std::ofstream(broken) << "{ \"geometry\": ";
  CHECK_FALSE(validate_file(broken).empty());
  CHECK_THROWS_AS(load_config(broken), ConfigError);
  CHECK_FALSE(validate_file(kScratch / "missing.json").empty());
}

TEST_CASE("shipped configs are valid") {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    INFO(entry.path().filename().string());
    CHECK(validate_file(entry.path()).empty());
    CHECK_FALSE(load_config(entry.path()).command.empty());
  }
  CHECK(count >= 9);
}

TEST_CASE("identical boundary data matches at once") {
  const auto out = kScratch / "match_identical";
  CHECK(run_config("match_identical", out) == kSuccess);
  const auto m = manifest(out);
  CHECK(m["status"] == "ok");
  CHECK(m["results"]["converged"] == true);
  CHECK(m["results"]["residual"].get<double>() < 1e-12);
  CHECK(fs::exists(out / "plotdata.csv"));
  CHECK(m["config"]["output"]["directory"] == out.string());
}

TEST_CASE("hopf run reports a cancelled phase") {
  const auto out = kScratch / "hopf_cancel";
  CHECK(run_config("hopf_cancel", out) == kSuccess);
  const auto r = manifest(out)["results"];
  CHECK(std::abs(r["phase"].get<double>()) < 1e-6);
  CHECK(r["closure_error"].get<double>() < 1e-6);
  CHECK(r["runs"].size() == 3);
}

TEST_CASE("an exhausted iteration budget exits 3 and still writes artifacts") {
  auto cfg = load_config(kConfigs / "match_circles.json");
  cfg.solver.max_iter = 1;
  const auto out = kScratch / "match_budget";
  CHECK(run_config("", out, &cfg) == kNonConvergence);
  const auto m = manifest(out);
  CHECK(m["status"] == "non_convergence");
  CHECK(m["exit_code"] == 3);
  CHECK(m["results"]["converged"] == false);
  CHECK(fs::exists(out / "plotdata.csv"));
}

TEST_CASE("numerical failures exit 4") {
  auto cfg = load_config(kConfigs / "flow_circle.json");
  cfg.flow.h0 = 2.0;
  cfg.flow.final_time = 3.0;
  const auto out = kScratch / "flow_collapse";
  CHECK(run_config("", out, &cfg) == kNumericalError);
  CHECK(manifest(out)["status"] == "numerical_error");
}

TEST_CASE("an unknown command is a config error") {
  const auto cfg = parse_config(json::object());
  std::ostringstream log;
  CHECK_THROWS_AS(run("solve", cfg, kScratch / "unknown", log), ConfigError);
}

TEST_CASE("repeated runs write byte-identical data") {
  for (const std::string name : {"sigma_bracket", "flow_circle", "match_reparametrized"}) {
    INFO(name);
    const auto a = kScratch / (name + "_a"), b = kScratch / (name + "_b");
    const int ca = run_config(name, a), cb = run_config(name, b);
    CHECK(ca == cb);
    CHECK(slurp(a / "plotdata.csv") == slurp(b / "plotdata.csv"));
    for (const auto& entry : fs::directory_iterator(a / "snapshots")) {
      CHECK(slurp(entry.path()) == slurp(b / "snapshots" / entry.path().filename()));
    }
    CHECK(manifest(a)["results"] == manifest(b)["results"]);
  }
}
