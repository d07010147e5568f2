#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbp_app/config.hpp"

namespace fbp::app {

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kConfigInvalid = 2, kSolverFailure = 3 };

inline constexpr const char* kManifestSchema = "fbp.manifest/1";

struct CommandOptions {
  std::string out_dir;  // empty: the config's output_dir
  int jobs = 1;
  std::ostream* progress = nullptr;  // solver progress lines
  std::ostream* log = nullptr;       // one-line summaries
};

/// Everything the pipeline produced for one configuration.
struct RunOutcome {
  int exit_code = kOk;
  nlohmann::json report;
  std::vector<std::string> artifacts;
};

/// Subcommands. Each writes its artifacts plus manifest.json into the
/// output directory and returns the process exit code.
int cmd_solve(const RunConfig& cfg, const CommandOptions& opt);   // FULL and SLAB_TEST
int cmd_axisym(const RunConfig& cfg, const CommandOptions& opt);
int cmd_oracle(const RunConfig& cfg, const CommandOptions& opt);
int cmd_reduce(const RunConfig& cfg, const CommandOptions& opt);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt);
/// Re-runs extraction and checks on solution.csv and report.json found in
/// the output directory; writes verify_report.json.
int cmd_verify(const RunConfig& cfg, const CommandOptions& opt);

/// In-memory FULL / AXISYM / SLAB_TEST / REDUCED pipeline without file
/// output; used by the commands, the sweep and the tests.
struct PipelineResult {
  std::optional<SolveResult> solve;
  std::optional<FreeBoundary> fb;
  std::optional<VerificationReport> checks;
  nlohmann::json report;
  int exit_code = kOk;
};
PipelineResult run_pipeline(const RunConfig& cfg, std::ostream* progress = nullptr);

/// Mode from a config file's "mode" key (FULL when absent).
Mode peek_mode(const std::string& path);

/// Runs a subcommand by name with exit-code mapping of all errors. Used by
/// main() and the CLI tests.
int dispatch(const std::string& command, const std::string& config_path, const CommandOptions& opt);

}  // namespace fbp::app
