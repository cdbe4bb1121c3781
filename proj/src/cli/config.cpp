#include <schwarzlab/cli/config.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace schwarzlab::cli {

std::string_view to_string(SolverKind k) {
  switch (k) {
    case SolverKind::richardson: return "richardson";
    case SolverKind::gmres: return "gmres";
    case SolverKind::primal: return "primal";
    case SolverKind::fetih: return "fetih";
  }
  return "?";
}

SolverKind parse_solver_kind(std::string_view s) {
  if (s == "richardson") return SolverKind::richardson;
  if (s == "gmres") return SolverKind::gmres;
  if (s == "primal") return SolverKind::primal;
  if (s == "fetih") return SolverKind::fetih;
  throw ValidationError("unknown solver '" + std::string(s) + "' (expected richardson, gmres, primal or fetih)");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ValidationError("config key '" + key + "': '" + v + "' is not a number");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ValidationError("config key '" + key + "': '" + v + "' is not an integer");
  return out;
}

Index to_count(const std::string& key, const std::string& v) {
  const long long n = to_int(key, v);
  if (n < 1) throw ValidationError("config key '" + key + "' must be at least 1");
  return static_cast<Index>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  using facets::FacetVariant;
  using traces::ExchangeVariant;
  auto& in = cfg.instance;
  if (name == "feti2lm") {
    in.facets = FacetVariant::properly_closed;
    in.exchange.variant = ExchangeVariant::swap;
    cfg.solver = SolverKind::gmres;
  } else if (name == "loisel") {
    in.facets = FacetVariant::globs;
    in.exchange.variant = ExchangeVariant::multiplicity;
    cfg.solver = SolverKind::gmres;
  } else if (name == "complete_comm") {
    in.facets = FacetVariant::globs;
    in.exchange.variant = ExchangeVariant::multiplicity;
    cfg.solver = SolverKind::primal;
  } else if (name == "fetih") {
    in.facets = FacetVariant::non_redundant;
    in.exchange.variant = ExchangeVariant::swap;
    cfg.solver = SolverKind::fetih;
  } else if (name == "exceptional") {
    in.exchange.variant = ExchangeVariant::exceptional;
    cfg.solver = SolverKind::richardson;
    cfg.iteration.beta = 1.0;
    cfg.iteration.zero_init = true;
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  cfg.preset = name;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.kind", [](RunConfig& c, auto&, auto& v) { c.instance.problem.kind = meshfem::parse_problem_kind(v); }},
      {"problem.kappa", [](RunConfig& c, auto& k, auto& v) { c.instance.problem.kappa = to_double(k, v); }},
      {"problem.eta", [](RunConfig& c, auto& k, auto& v) { c.instance.problem.eta = to_double(k, v); }},
      {"problem.loss", [](RunConfig& c, auto& k, auto& v) { c.instance.problem.loss = to_double(k, v); }},
      {"problem.source",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "constant") c.instance.problem.source.kind = meshfem::SourceSpec::Kind::constant;
         else if (v == "point") c.instance.problem.source.kind = meshfem::SourceSpec::Kind::point;
         else throw ValidationError("config key '" + k + "': expected constant or point");
       }},
      {"problem.source_value", [](RunConfig& c, auto& k, auto& v) { c.instance.problem.source.value = to_double(k, v); }},
      {"problem.source_x", [](RunConfig& c, auto& k, auto& v) { c.instance.problem.source.x = to_double(k, v); }},
      {"problem.source_y", [](RunConfig& c, auto& k, auto& v) { c.instance.problem.source.y = to_double(k, v); }},
      {"problem.boundary",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "default") {
           c.instance.boundary.reset();
           return;
         }
         const auto parts = split_list(v);
         if (parts.size() == 1) {
           c.instance.boundary = meshfem::BoundarySpec::all(meshfem::parse_boundary_kind(parts[0]));
         } else if (parts.size() == 4) {
           c.instance.boundary = meshfem::BoundarySpec{
               meshfem::parse_boundary_kind(parts[0]), meshfem::parse_boundary_kind(parts[1]),
               meshfem::parse_boundary_kind(parts[2]), meshfem::parse_boundary_kind(parts[3])};
         } else {
           throw ValidationError("config key '" + k + "': expected one kind or left,right,bottom,top");
         }
       }},
      {"mesh.nx", [](RunConfig& c, auto& k, auto& v) { c.instance.nx = to_count(k, v); }},
      {"mesh.ny", [](RunConfig& c, auto& k, auto& v) { c.instance.ny = to_count(k, v); }},
      {"partition.px", [](RunConfig& c, auto& k, auto& v) { c.instance.px = to_count(k, v); }},
      {"partition.py", [](RunConfig& c, auto& k, auto& v) { c.instance.py = to_count(k, v); }},
      {"method.preset", [](RunConfig&, auto&, auto&) {}},
      {"method.facets", [](RunConfig& c, auto&, auto& v) { c.instance.facets = facets::parse_facet_variant(v); }},
      {"method.exchange",
       [](RunConfig& c, auto&, auto& v) { c.instance.exchange.variant = traces::parse_exchange_variant(v); }},
      {"method.weights", [](RunConfig& c, auto& k, auto& v) { c.instance.exchange.weights = to_list(k, v); }},
      {"method.impedance",
       [](RunConfig& c, auto&, auto& v) { c.instance.impedance = traces::parse_impedance_variant(v); }},
      {"method.sigma",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "default") c.instance.sigma.reset();
         else c.instance.sigma = to_double(k, v);
       }},
      {"method.side_scale", [](RunConfig& c, auto& k, auto& v) { c.instance.side_scale = to_list(k, v); }},
      {"method.allow_inadmissible",
       [](RunConfig& c, auto& k, auto& v) { c.instance.allow_inadmissible = to_bool(k, v); }},
      {"solver.kind", [](RunConfig& c, auto&, auto& v) { c.solver = parse_solver_kind(v); }},
      {"solver.beta", [](RunConfig& c, auto& k, auto& v) { c.iteration.beta = to_double(k, v); }},
      {"solver.tol", [](RunConfig& c, auto& k, auto& v) { c.iteration.tol = to_double(k, v); }},
      {"solver.maxit", [](RunConfig& c, auto& k, auto& v) { c.iteration.maxit = to_count(k, v); }},
      {"solver.seed",
       [](RunConfig& c, auto& k, auto& v) { c.iteration.seed = static_cast<unsigned long long>(to_int(k, v)); }},
      {"solver.norm", [](RunConfig& c, auto&, auto& v) { c.iteration.norm = solvers::parse_norm_mode(v); }},
      {"solver.zero_init", [](RunConfig& c, auto& k, auto& v) { c.iteration.zero_init = to_bool(k, v); }},
      {"solver.log_energy", [](RunConfig& c, auto& k, auto& v) { c.iteration.log_energy = to_bool(k, v); }},
      {"solver.divergence_window",
       [](RunConfig& c, auto& k, auto& v) { c.iteration.divergence_window = to_count(k, v); }},
      {"solver.diagnostics", [](RunConfig& c, auto& k, auto& v) { c.diagnostics = to_bool(k, v); }},
      {"solver.parallel_subdomains", [](RunConfig& c, auto& k, auto& v) { c.parallel = to_bool(k, v); }},
      {"output.dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; }},
      {"output.dump_operators", [](RunConfig& c, auto& k, auto& v) { c.dump_operators = to_bool(k, v); }},
      {"output.wall_time", [](RunConfig& c, auto& k, auto& v) { c.wall_time = to_bool(k, v); }},
  };
  return table;
}

}  // namespace

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  std::string section = "run";
  std::istringstream is{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("config line " + std::to_string(line_no) + ": unterminated section");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
    out[key.find('.') == std::string::npos ? section + "." + key : key] = trim(std::string_view(line).substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string to_config_text(const ConfigMap& map) {
  std::string out;
  std::string current;
  for (const auto& [key, value] : map) {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    if (section != current) {
      if (!current.empty()) out += "\n";
      out += "[" + section + "]\n";
      current = section;
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

std::vector<std::string> preset_names() { return {"feti2lm", "loisel", "complete_comm", "fetih", "exceptional"}; }

RunConfig make_run_config(const ConfigMap& map) {
  RunConfig cfg;
  cfg.instance.problem.kind = meshfem::ProblemKind::laplace;
  if (auto it = map.find("method.preset"); it != map.end() && !it->second.empty() && it->second != "none")
    apply_preset(cfg, it->second);
  const auto& table = setters();
  for (const auto& [key, value] : map) {
    const auto it = table.find(key);
    if (it == table.end()) throw ValidationError("unknown config key '" + key + "'");
    it->second(cfg, key, value);
  }
  return cfg;
}

void validate_combination(const RunConfig& cfg) {
  using facets::FacetVariant;
  using traces::ExchangeVariant;
  const auto& in = cfg.instance;
  const bool glob = in.facets == FacetVariant::globs;
  const auto x = in.exchange.variant;
  const bool wave = in.problem.kind == meshfem::ProblemKind::helmholtz;
  solvers::validate(cfg.iteration);
  if (x == ExchangeVariant::exceptional) {
    if (wave)
      throw ValidationError(
          "rejected [one-step exchange precondition]: the exceptional exchange X = 2 R A^-1 R^T A - I needs a "
          "symmetric coercive A (coercive mode, alpha = 1); helmholtz runs in wave mode");
    if (cfg.solver == SolverKind::fetih || cfg.solver == SolverKind::primal)
      throw ValidationError("rejected: the exceptional exchange is solved with the dual richardson or gmres drivers");
    return;
  }
  if (x == ExchangeVariant::swap && glob && cfg.solver != SolverKind::fetih)
    throw ValidationError(
        "rejected [bilateral exchange requirement]: swap exchange requires a bilateral facet system (every facet "
        "shared by exactly two subdomains); glob systems use a reflection exchange");
  if (x != ExchangeVariant::swap && !glob)
    throw ValidationError("rejected [reflection exchange requirement]: " + std::string(traces::to_string(x)) +
                          " exchange is built from glob averaging and requires method.facets = globs");
  if (cfg.solver == SolverKind::fetih) {
    if (glob)
      throw ValidationError("rejected [FETI-H requirement]: the one-sided jump needs a bilateral facet system");
    if (wave && (in.problem.loss != 0.0 || !in.boundary.has_value() ||
                 in.boundary->left == meshfem::BoundaryKind::robin || in.boundary->right == meshfem::BoundaryKind::robin ||
                 in.boundary->bottom == meshfem::BoundaryKind::robin || in.boundary->top == meshfem::BoundaryKind::robin))
      throw ValidationError(
          "rejected [FETI-H requirement]: the sign-alternating augmentation assumes loss-free subdomain operators "
          "(A_i1 = 0); remove volumetric loss and Robin boundary sides");
  }
}

ConfigMap effective_config(const RunConfig& cfg) {
  const auto& in = cfg.instance;
  const auto& p = in.problem;
  const auto b = in.boundary.value_or(meshfem::default_boundary(p.kind));
  ConfigMap m;
  m["method.preset"] = cfg.preset.empty() ? "none" : cfg.preset;
  m["problem.kind"] = std::string(meshfem::to_string(p.kind));
  m["problem.kappa"] = fmt(p.kappa);
  m["problem.eta"] = fmt(p.eta);
  m["problem.loss"] = fmt(p.loss);
  m["problem.source"] = p.source.kind == meshfem::SourceSpec::Kind::point ? "point" : "constant";
  m["problem.source_value"] = fmt(p.source.value);
  m["problem.source_x"] = fmt(p.source.x);
  m["problem.source_y"] = fmt(p.source.y);
  m["problem.boundary"] = std::string(meshfem::to_string(b.left)) + "," + std::string(meshfem::to_string(b.right)) +
                          "," + std::string(meshfem::to_string(b.bottom)) + "," +
                          std::string(meshfem::to_string(b.top));
  m["mesh.nx"] = std::to_string(in.nx);
  m["mesh.ny"] = std::to_string(in.ny);
  m["partition.px"] = std::to_string(in.px);
  m["partition.py"] = std::to_string(in.py);
  m["method.facets"] = std::string(facets::to_string(in.facets));
  m["method.exchange"] = std::string(traces::to_string(in.exchange.variant));
  std::vector<double> w = in.exchange.weights;
  if (w.empty())
    for (Index j = 0; j < in.px * in.py; ++j) w.push_back(1.0 + static_cast<double>(j));
  m["method.weights"] = join(w);
  m["method.impedance"] = std::string(traces::to_string(in.impedance));
  m["method.sigma"] = fmt(in.sigma.value_or(formulations::default_sigma(p)));
  std::vector<double> s = in.side_scale;
  if (s.empty()) s.assign(in.px * in.py, 1.0);
  m["method.side_scale"] = join(s);
  m["method.allow_inadmissible"] = fmt(in.allow_inadmissible);
  m["solver.kind"] = std::string(to_string(cfg.solver));
  m["solver.beta"] = fmt(cfg.iteration.beta);
  m["solver.tol"] = fmt(cfg.iteration.tol);
  m["solver.maxit"] = std::to_string(cfg.iteration.maxit);
  m["solver.seed"] = std::to_string(cfg.iteration.seed);
  m["solver.norm"] = std::string(solvers::to_string(cfg.iteration.norm));
  m["solver.zero_init"] = fmt(cfg.iteration.zero_init);
  m["solver.log_energy"] = fmt(cfg.iteration.log_energy);
  m["solver.divergence_window"] = std::to_string(cfg.iteration.divergence_window);
  m["solver.diagnostics"] = fmt(cfg.diagnostics);
  m["solver.parallel_subdomains"] = fmt(cfg.parallel);
  m["output.dir"] = cfg.output_dir;
  m["output.dump_operators"] = fmt(cfg.dump_operators);
  m["output.wall_time"] = fmt(cfg.wall_time);
  return m;
}

}  // namespace schwarzlab::cli
