#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "unred_cli/config.hpp"

namespace unred::cli {

enum ExitCode : int {
  kSuccess = 0,
  kChecksFailed = 1,
  kConfigError = 2,
  kNonConvergence = 3,
  kNumericalError = 4,
};

/// Runs one command and writes manifest.json, plotdata.csv and snapshots/
/// into `out`. Returns the process exit code. Artifacts are written for
/// non-converged and failed runs as well, with the error in the manifest.
int run(const std::string& command, const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

}  // namespace unred::cli
