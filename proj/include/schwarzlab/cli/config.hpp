#pragma once

#include <schwarzlab/formulations/instance.hpp>
#include <schwarzlab/solvers/iteration.hpp>

#include <map>
#include <string>

namespace schwarzlab::cli {

enum class SolverKind { richardson, gmres, primal, fetih };

std::string_view to_string(SolverKind k);
SolverKind parse_solver_kind(std::string_view s);

// Flat "section.key" -> value map.
using ConfigMap = std::map<std::string, std::string>;

// "[section]" headers, "key = value" lines, '#' or ';' comments. Keys before
// the first header land in section "run".
ConfigMap parse_config_text(std::string_view text);
ConfigMap read_config_file(const std::string& path);
std::string to_config_text(const ConfigMap& map);

struct RunConfig {
  std::string preset;  // empty: no preset
  formulations::InstanceSpec instance;
  solvers::IterationConfig iteration;
  SolverKind solver = SolverKind::richardson;
  // estimate gamma and the rate bounds when the trace space is small enough
  bool diagnostics = true;
  bool parallel = false;
  std::string output_dir = "schwarzlab_out";
  bool dump_operators = false;
  bool wall_time = false;
};

// Named methods: facet system, exchange and solver they stand for.
std::vector<std::string> preset_names();

// Applies the preset named in `method.preset` first, then every explicit
// key. Unknown keys and malformed values throw ValidationError.
RunConfig make_run_config(const ConfigMap& map);

// Rejects combinations that violate a structural requirement of the method.
void validate_combination(const RunConfig& cfg);

// Every setting with its effective value, in the same key space.
ConfigMap effective_config(const RunConfig& cfg);

}  // namespace schwarzlab::cli
