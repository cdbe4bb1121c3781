#pragma once

#include <schwarzlab/cli/report.hpp>

#include <iosfwd>

namespace schwarzlab::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitDiverged = 3, kExitAssumption = 4 };

// Environment variable that relocates relative output directories.
inline constexpr const char* kOutputRootEnv = "SCHWARZLAB_OUTPUT_ROOT";

struct RunOptions {
  bool parallel_subdomains = false;  // OR-ed with solver.parallel_subdomains
  bool write_outputs = true;
  std::ostream* log = nullptr;
};

struct RunOutcome {
  RunReport report;
  std::string output_dir;
  solvers::ConvergenceReport convergence;
};

std::string resolve_output_dir(const std::string& dir);

// Builds, solves and writes report.json, history.csv and optional .mtx dumps.
// Never throws for validation or assumption failures; they end up in the
// report's status and exit code.
RunOutcome run(const ConfigMap& config, const RunOptions& opts = {});

// Builds the instance and runs the invariant battery without solving.
RunOutcome verify(const ConfigMap& config, const RunOptions& opts = {});

// One run per point of the Cartesian product of `vary` ("key=v1,v2,...").
// Points go to <output.dir>/<key=value_...>; returns the largest exit code.
int sweep(const ConfigMap& config, const std::vector<std::string>& vary, const RunOptions& opts = {});

// iteration,residual,lambda_error,primal_error,p,energy_defect[,wall_time]
void write_history_csv(std::ostream& os, const solvers::ConvergenceReport& rep, bool wall_time);

}  // namespace schwarzlab::cli
