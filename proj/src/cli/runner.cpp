#include <schwarzlab/cli/runner.hpp>

#include <schwarzlab/formulations/dual.hpp>
#include <schwarzlab/formulations/fetih.hpp>
#include <schwarzlab/linalg/matrix_market.hpp>
#include <schwarzlab/linalg/spectral.hpp>
#include <schwarzlab/solvers/gamma.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace schwarzlab::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr Index kDenseLimit = 1000;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

std::string fnum(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// negative entries are "not recorded"
std::string num(double v) { return v < 0.0 ? std::string() : fnum(v); }

void say(const RunOptions& opts, const std::string& msg) {
  if (opts.log) *opts.log << msg << "\n";
}

void fail(RunReport& rep, const std::string& status, int code, const std::string& msg) {
  rep.status = status;
  rep.exit_code = code;
  rep.message = msg;
}

std::vector<Vector> redundancy_vectors(const formulations::Instance& inst) {
  if (inst.trace.is_identity() || !inst.system.bilateral()) return {};
  return facets::redundancy_basis(inst.system, inst.dec.mult, inst.trace.indexer()).vectors;
}

void add_check(RunReport& rep, std::string name, bool pass, double value, double tol, std::string detail = {}) {
  rep.checks.push_back({std::move(name), pass ? "pass" : "fail", finite_or(value, -1.0), tol, std::move(detail)});
}

void skip_check(RunReport& rep, std::string name, std::string why) {
  rep.checks.push_back({std::move(name), "skipped", 0.0, 0.0, std::move(why)});
}

DenseMatrix stacked_redundancy_operator(const formulations::Instance& inst) {
  const Index n = inst.trace.dimension();
  const Index m = inst.trace.u_dimension();
  const DenseMatrix tt = DenseMatrix::from_sparse(inst.trace.compound().transpose());
  const DenseMatrix xt = inst.exchange.dense().transpose();
  DenseMatrix s(m + n, n);
  for (Index r = 0; r < m; ++r)
    for (Index c = 0; c < n; ++c) s(r, c) = tt(r, c);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) s(m + r, c) = xt(r, c) + (r == c ? 1.0 : 0.0);
  return s;
}

void run_battery(RunReport& rep, const formulations::Instance& inst, const formulations::DualSystem& dual,
                 unsigned long long seed) {
  const auto asm_rep = decomp::check_assembling(inst.dec.restriction, inst.dec.local, inst.problem);
  add_check(rep, "assembling", asm_rep.passed, asm_rep.matrix_deviation + asm_rep.load_deviation, 0.0,
            asm_rep.message);

  if (inst.trace.is_identity()) {
    skip_check(rep, "admissibility", "identity trace");
  } else {
    const auto& a = inst.admissibility;
    add_check(rep, "admissibility", a.admissible, static_cast<double>(a.disconnected_dofs.size() + a.uncovered_dofs.size()),
              0.0, a.admissible ? "" : "facet system leaves interface dofs uncovered or disconnected");
  }

  const auto xc = traces::check_exchange(inst.exchange, inst.trace, inst.impedance, inst.dec.restriction, 20,
                                         static_cast<unsigned>(seed));
  add_check(rep, "exchange_involution", xc.involution <= 1e-12, xc.involution, 1e-12);
  add_check(rep, "exchange_conformity", xc.conformity <= 1e-12, xc.conformity, 1e-12);
  const bool a4 = xc.m_invariance <= 1e-10;
  add_check(rep, "impedance_isometry", a4, xc.m_invariance, 1e-10,
            a4 ? "" : "X^T M X differs from M; the general form of S and d is in use");

  const Index n = dual.dimension();
  if (n <= kDenseLimit) {
    const Index dim_z = nullspace_dimension(stacked_redundancy_operator(inst), 1e-9);
    add_check(rep, "redundancy_dimension", static_cast<long>(dim_z) == inst.admissibility.total_cycles ||
                                               (inst.trace.is_identity() && dim_z == 0),
              static_cast<double>(dim_z), 0.0,
              "nullspace of [T^T; I + X^T] against sum of |E_k| + 1 - |N_k| = " +
                  std::to_string(inst.admissibility.total_cycles));
    if (a4) {
      const Index dk = solvers::dual_kernel_dimension(dual);
      add_check(rep, "dual_kernel", dk == dim_z, static_cast<double>(dk), 0.0, "dim ker(I - X^T S) against dim Z");
    } else {
      skip_check(rep, "dual_kernel", "requires X^T M X = M");
    }
  } else {
    skip_check(rep, "redundancy_dimension", "trace space too large for a dense SVD");
    skip_check(rep, "dual_kernel", "trace space too large for a dense SVD");
  }

  if (a4) {
    double defect = 0.0;
    double expansion = 0.0;
    for (int p = 0; p < 10; ++p) {
      const Vector l = traces::random_vector(n, seed + 1000 + p);
      const auto e = dual.pseudo_energy(l);
      defect = std::max(defect, e.defect / std::max(e.lambda_norm2, 1e-300));
      expansion = std::max(expansion, e.s_norm2 / std::max(e.lambda_norm2, 1e-300) - 1.0);
    }
    add_check(rep, "pseudo_energy", defect <= 1e-10, defect, 1e-10);
    add_check(rep, "non_expansive", expansion <= 1e-12, expansion, 1e-12);
  } else {
    skip_check(rep, "pseudo_energy", "requires X^T M X = M");
    skip_check(rep, "non_expansive", "requires X^T M X = M");
  }
}

void dump_operators(const fs::path& dir, const formulations::Instance& inst, const formulations::DualSystem* dual) {
  const auto& p = inst.problem;
  write_matrix_market((dir / "A_hat.mtx").string(), meshfem::combine(p.A0, p.A1, p.A2, p.wave));
  write_matrix_market((dir / "f_hat.mtx").string(), std::span<const Scalar>(p.f));
  write_matrix_market((dir / "T.mtx").string(), inst.trace.compound());
  write_matrix_market((dir / "M.mtx").string(), inst.impedance.compound());
  if (inst.exchange.has_matrix()) write_matrix_market((dir / "X.mtx").string(), inst.exchange.matrix());
  else write_matrix_market((dir / "X.mtx").string(), inst.exchange.dense());
  if (dual != nullptr) {
    write_matrix_market((dir / "d.mtx").string(), std::span<const Scalar>(dual->rhs()));
    if (dual->dimension() <= kDenseLimit) {
      write_matrix_market((dir / "S.mtx").string(), dual->dense_S());
      write_matrix_market((dir / "I_minus_XtS.mtx").string(), dual->dense_operator());
    }
  }
}

double relative_error(std::span<const Scalar> u, std::span<const Scalar> ref) {
  const double s = norm2(ref);
  const double e = norm2(sub(u, ref));
  return s > 0.0 ? e / s : e;
}

struct Prepared {
  RunConfig cfg;
  RunReport report;
  std::optional<formulations::Instance> inst;
};

// Parses, validates and builds; on failure the report carries the status.
Prepared prepare(const ConfigMap& config, const std::string& command, const RunOptions& opts) {
  Prepared p;
  p.report.command = command;
  p.report.config = config;
  p.report.status = "ok";
  try {
    p.cfg = make_run_config(config);
    p.cfg.parallel = p.cfg.parallel || opts.parallel_subdomains;
    p.report.config = effective_config(p.cfg);
    p.report.seed = p.cfg.iteration.seed;
    validate_combination(p.cfg);
    const auto t0 = Clock::now();
    p.inst.emplace(formulations::build_instance(p.cfg.instance));
    if (p.cfg.solver == SolverKind::primal && !p.inst->trace.has_right_inverse())
      throw ValidationError(
          "rejected [surjective trace requirement]: the primal recurrence needs an extension E with T E = I; "
          "bilateral facet systems lose it at cross points shared by three or more subdomains, use globs");
    p.report.setup_seconds = seconds_since(t0);
    p.report.trace_dimension = p.inst->trace.dimension();
    p.report.redundancy = p.inst->trace.is_identity() ? 0 : p.inst->admissibility.total_cycles;
  } catch (const AssumptionError& e) {
    fail(p.report, "assumption_failed", kExitAssumption, e.what());
    p.inst.reset();
  } catch (const ValidationError& e) {
    fail(p.report, "validation_error", kExitValidation, e.what());
    p.inst.reset();
  }
  return p;
}

fs::path output_path(const RunConfig& cfg) { return fs::path(resolve_output_dir(cfg.output_dir)); }

void write_outputs(const fs::path& dir, const RunOutcome& out, bool wall_time, bool history) {
  fs::create_directories(dir);
  write_report((dir / "report.json").string(), out.report);
  if (history) {
    std::ofstream csv(dir / "history.csv", std::ios::binary);
    write_history_csv(csv, out.convergence, wall_time);
  }
}

}  // namespace

std::string resolve_output_dir(const std::string& dir) {
  const char* root = std::getenv(kOutputRootEnv);
  fs::path p(dir);
  if (root != nullptr && *root != '\0' && p.is_relative()) p = fs::path(root) / p;
  return p.string();
}

void write_history_csv(std::ostream& os, const solvers::ConvergenceReport& rep, bool wall_time) {
  os << "iteration,residual,lambda_error,primal_error,p,energy_defect";
  if (wall_time) os << ",wall_time";
  os << "\n";
  for (const auto& r : rep.history) {
    os << r.iteration << "," << num(r.residual) << "," << num(r.error) << "," << num(r.primal_error) << ","
       << (r.p == -1.0 ? std::string() : fnum(r.p))
       << "," << num(r.energy_defect);
    if (wall_time) os << "," << num(r.wall_time);
    os << "\n";
  }
}

RunOutcome run(const ConfigMap& config, const RunOptions& opts) {
  Prepared p = prepare(config, "run", opts);
  RunOutcome out;
  out.output_dir = output_path(p.cfg).string();
  RunReport& rep = p.report;
  if (p.inst) {
    const auto& inst = *p.inst;
    const auto& cfg = p.cfg;
    try {
      solvers::IterationConfig it = cfg.iteration;
      it.timing = cfg.wall_time;
      const auto t0 = Clock::now();
      std::optional<formulations::DualSystem> dual;
      if (cfg.solver == SolverKind::fetih) {
        const auto h = formulations::fetih_build(inst, cfg.parallel);
        Vector f;
        for (const auto& fi : inst.dec.local.f) f.insert(f.end(), fi.begin(), fi.end());
        const auto sol = formulations::fetih_solve(h, f, it.tol, it.maxit);
        auto& c = out.convergence;
        c.method = "fetih";
        for (Index n = 0; n < sol.gmres.residuals.size(); ++n) {
          solvers::IterationRecord r;
          r.iteration = n;
          r.residual = sol.gmres.residuals[n];
          c.history.push_back(r);
        }
        c.iterations = sol.gmres.iterations;
        c.converged = sol.gmres.converged;
        c.breakdown = sol.gmres.breakdown;
        c.final_residual = sol.gmres.true_residual;
        c.final_primal_error = relative_error(sol.u, inst.reference);
        if (!c.history.empty()) c.history.back().primal_error = c.final_primal_error;
        c.rho_obs = solvers::fit_rate(sol.gmres.residuals);
        c.u = sol.u;
        c.lambda = sol.lambda;
      } else {
        dual.emplace(inst, cfg.parallel);
        rep.simplified_form = dual->simplified();
        const auto z = redundancy_vectors(inst);
        const bool want_lambda = it.log_energy && dual->dimension() <= 2000;
        const solvers::Reference ref = solvers::make_reference(*dual, inst.reference, z, want_lambda);
        if (cfg.diagnostics && dual->dimension() <= kDenseLimit) {
          const double g = solvers::estimate_gamma(*dual, z);
          rep.gamma = g;
          rep.rho_thm = solvers::richardson_bound(it.beta, g);
          rep.rho_gmres = solvers::gmres_bound(g);
        }
        switch (cfg.solver) {
          case SolverKind::richardson: out.convergence = solvers::richardson(*dual, it, &ref); break;
          case SolverKind::primal: out.convergence = solvers::primal_iterate(*dual, it, &ref); break;
          case SolverKind::gmres: out.convergence = solvers::gmres_dual(*dual, it, &ref); break;
          case SolverKind::fetih: break;
        }
      }
      rep.solve_seconds = seconds_since(t0);
      const auto& c = out.convergence;
      rep.iterations = c.iterations;
      rep.converged = c.converged;
      rep.diverged = c.diverged;
      rep.rho_obs = finite_or(c.rho_obs, -1.0);
      rep.final_residual = finite_or(c.final_residual, -1.0);
      rep.final_primal_error = finite_or(c.final_primal_error, -1.0);
      rep.max_energy_defect = finite_or(c.max_energy_defect, -1.0);
      if (c.diverged) fail(rep, "diverged", kExitDiverged, "error grew over the divergence window");
      else if (!c.converged) fail(rep, "not_converged", kExitDiverged, "tolerance not reached within maxit");
      if (opts.write_outputs && cfg.dump_operators) {
        fs::create_directories(out.output_dir);
        dump_operators(out.output_dir, inst, dual ? &*dual : nullptr);
      }
    } catch (const AssumptionError& e) {
      fail(rep, "assumption_failed", kExitAssumption, e.what());
    } catch (const ValidationError& e) {
      fail(rep, "validation_error", kExitValidation, e.what());
    }
  }
  say(opts, "run: " + rep.status + (rep.message.empty() ? "" : " (" + rep.message + ")"));
  out.report = rep;
  if (opts.write_outputs) write_outputs(out.output_dir, out, p.cfg.wall_time, p.inst.has_value());
  return out;
}

RunOutcome verify(const ConfigMap& config, const RunOptions& opts) {
  Prepared p = prepare(config, "verify", opts);
  RunOutcome out;
  out.output_dir = output_path(p.cfg).string();
  RunReport& rep = p.report;
  if (p.inst) {
    try {
      const formulations::DualSystem dual(*p.inst, p.cfg.parallel);
      rep.simplified_form = dual.simplified();
      run_battery(rep, *p.inst, dual, p.cfg.iteration.seed);
      for (const auto& c : rep.checks)
        if (c.failed()) {
          fail(rep, "assumption_failed", kExitAssumption, "check '" + c.name + "' failed");
          break;
        }
    } catch (const AssumptionError& e) {
      fail(rep, "assumption_failed", kExitAssumption, e.what());
    } catch (const ValidationError& e) {
      fail(rep, "validation_error", kExitValidation, e.what());
    }
  }
  for (const auto& c : rep.checks) say(opts, c.status + " " + c.name);
  say(opts, "verify: " + rep.status + (rep.message.empty() ? "" : " (" + rep.message + ")"));
  out.report = rep;
  if (opts.write_outputs) write_outputs(out.output_dir, out, false, false);
  return out;
}

int sweep(const ConfigMap& config, const std::vector<std::string>& vary, const RunOptions& opts) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& spec : vary) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--vary expects key=v1,v2,... (got '" + spec + "')");
    std::string key = spec.substr(0, eq);
    std::vector<std::string> values;
    std::stringstream ss(spec.substr(eq + 1));
    std::string v;
    while (std::getline(ss, v, ','))
      if (!v.empty()) values.push_back(v);
    if (values.empty()) throw ValidationError("--vary " + key + " has no values");
    axes.emplace_back(std::move(key), std::move(values));
  }
  const std::string base = make_run_config(config).output_dir;
  std::vector<std::size_t> idx(axes.size(), 0);
  int worst = kExitOk;
  while (true) {
    ConfigMap point = config;
    std::string name;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      point[axes[a].first] = axes[a].second[idx[a]];
      if (!name.empty()) name += "_";
      name += axes[a].first + "=" + axes[a].second[idx[a]];
    }
    if (name.empty()) name = "point";
    point["output.dir"] = (fs::path(base) / name).string();
    say(opts, "sweep point " + name);
    worst = std::max(worst, run(point, opts).report.exit_code);
    std::size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
    }
    if (a == axes.size()) break;
  }
  return worst;
}

}  // namespace schwarzlab::cli
