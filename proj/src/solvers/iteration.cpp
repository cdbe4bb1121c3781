#include <schwarzlab/solvers/iteration.hpp>

#include <schwarzlab/linalg/spectral.hpp>

#include <chrono>
#include <cmath>

namespace schwarzlab::solvers {

std::string_view to_string(NormMode m) { return m == NormMode::M_inverse ? "M_inverse" : "euclidean"; }

NormMode parse_norm_mode(std::string_view s) {
  if (s == "M_inverse" || s == "m_inverse") return NormMode::M_inverse;
  if (s == "euclidean") return NormMode::euclidean;
  throw ValidationError("unknown norm mode '" + std::string(s) + "' (expected M_inverse or euclidean)");
}

void validate(const IterationConfig& cfg) {
  if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) throw ValidationError("damping beta must lie in (0, 1]");
  if (!(cfg.tol > 0.0)) throw ValidationError("tolerance must be positive");
}

Vector initial_lambda(Index n, const IterationConfig& cfg) {
  if (cfg.zero_init) return Vector(n, 0.0);
  return traces::random_vector(n, cfg.seed);
}

namespace {

using Clock = std::chrono::steady_clock;

double dual_norm(const formulations::DualSystem& dual, NormMode mode, std::span<const Scalar> v) {
  if (mode == NormMode::euclidean) return norm2(v);
  return std::sqrt(std::max(0.0, dual.impedance().inverse_norm_squared(v)));
}

double rel_primal_error(std::span<const Scalar> u, const Reference* ref) {
  if (ref == nullptr || ref->u.empty()) return -1.0;
  const double scale = norm2(ref->u);
  const double e = norm2(sub(u, ref->u));
  return scale > 0.0 ? e / scale : e;
}

// energy identity terms for mu: prediction of ||mu+||^2
double energy_prediction(const formulations::DualSystem& dual, std::span<const Scalar> mu, double beta) {
  const Vector kmu = dual.apply(mu);
  const Vector xsmu = sub(mu, kmu);
  const auto& m = dual.impedance();
  return (1.0 - beta) * m.inverse_norm_squared(mu) - beta * (1.0 - beta) * m.inverse_norm_squared(kmu) +
         beta * m.inverse_norm_squared(xsmu);
}

struct Tracker {
  Tracker(const formulations::DualSystem& d, const IterationConfig& c, const Reference* r, ConvergenceReport& out)
      : dual(d), cfg(c), ref(r), rep(out) {}

  const formulations::DualSystem& dual;
  const IterationConfig& cfg;
  const Reference* ref;
  ConvergenceReport& rep;
  Clock::time_point start = Clock::now();
  double pending_prediction = -1.0;
  double pending_scale = 0.0;
  std::vector<double> errors;

  bool has_lambda_ref() const { return ref != nullptr && ref->lambda.has_value(); }

  // Records iterate n; returns the error quantity used for divergence.
  void record(Index n, double residual, std::span<const Scalar> lambda, std::span<const Scalar> u) {
    IterationRecord r;
    r.iteration = n;
    r.residual = residual;
    r.primal_error = rel_primal_error(u, ref);
    if (has_lambda_ref()) {
      const Vector mu = sub(lambda, *ref->lambda);
      const Vector mud = ref->redundancy.empty() ? mu : deflate(dual, ref->redundancy, mu);
      r.error = dual_norm(dual, cfg.norm, mud);
      if (cfg.log_energy) {
        const double now = dual.impedance().inverse_norm_squared(mu);
        if (pending_prediction >= 0.0) {
          r.energy_defect = std::abs(now - pending_prediction) / std::max(pending_scale, 1e-300);
          rep.max_energy_defect = std::max(rep.max_energy_defect, r.energy_defect);
        }
        pending_prediction = energy_prediction(dual, mu, cfg.beta);
        pending_scale = now;
        r.p = dual.pseudo_energy_of(dual.homogeneous(mu));
      }
    }
    if (cfg.timing) r.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    rep.history.push_back(r);
    errors.push_back(r.error >= 0.0 ? r.error : r.residual);
    if (cfg.keep_iterates) rep.iterates.emplace_back(u.begin(), u.end());
  }

  bool diverging() const { return is_diverging(errors, cfg.divergence_window); }
};

double residual_scale(double dn, double r0) {
  if (dn > 0.0) return dn;
  if (r0 > 0.0) return r0;
  return 1.0;
}

void finish(ConvergenceReport& rep, const Tracker& t) {
  rep.final_residual = rep.history.empty() ? 0.0 : rep.history.back().residual;
  rep.final_primal_error = rep.history.empty() ? -1.0 : rep.history.back().primal_error;
  rep.rho_obs = fit_rate(t.errors);
}

}  // namespace

Vector deflate(const formulations::DualSystem& dual, const std::vector<Vector>& z, std::span<const Scalar> v) {
  if (z.empty()) return Vector(v.begin(), v.end());
  const Index k = z.size();
  std::vector<Vector> wz;
  for (const auto& zj : z) wz.push_back(dual.impedance().apply_inverse(zj));
  DenseMatrix g(k, k);
  Vector h(k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      Scalar s = 0.0;
      for (Index i = 0; i < v.size(); ++i) s += std::conj(z[a][i]) * wz[b][i];
      g(a, b) = s;
    }
    Scalar s = 0.0;
    for (Index i = 0; i < v.size(); ++i) s += std::conj(wz[a][i]) * v[i];
    h[a] = s;
  }
  const Vector c = factorize(g).solve(h);
  Vector out(v.begin(), v.end());
  for (Index a = 0; a < k; ++a)
    for (Index i = 0; i < out.size(); ++i) out[i] -= c[a] * z[a][i];
  return out;
}

Vector deflated_reference(const formulations::DualSystem& dual, const std::vector<Vector>& redundancy) {
  if (dual.dimension() > 2000) throw ValidationError("reference dual solve limited to 2000 trace dofs");
  const Vector x = least_squares(dual.dense_operator(), dual.rhs());
  return deflate(dual, redundancy, x);
}

Reference make_reference(const formulations::DualSystem& dual, const Vector& u_reference,
                         const std::vector<Vector>& redundancy, bool with_lambda) {
  Reference r;
  r.u = u_reference;
  r.redundancy = redundancy;
  if (with_lambda) r.lambda = deflated_reference(dual, redundancy);
  return r;
}

ConvergenceReport richardson(const formulations::DualSystem& dual, const IterationConfig& cfg, const Reference* ref) {
  validate(cfg);
  ConvergenceReport rep;
  rep.method = "richardson";
  rep.beta = cfg.beta;
  rep.seed = cfg.seed;
  Tracker t{dual, cfg, ref, rep};
  Vector lambda = initial_lambda(dual.dimension(), cfg);
  const double dn = dual_norm(dual, cfg.norm, dual.rhs());
  double scale = -1.0;
  for (Index n = 0;; ++n) {
    const Vector kl = dual.apply(lambda);
    const Vector r = sub(dual.rhs(), kl);
    const double rn = dual_norm(dual, cfg.norm, r);
    if (scale < 0.0) scale = residual_scale(dn, rn);
    const Vector u = dual.primal(lambda);
    t.record(n, rn / scale, lambda, u);
    rep.iterations = n;
    if (rn / scale <= cfg.tol) {
      rep.converged = true;
      break;
    }
    if (n >= cfg.maxit) break;
    if (t.diverging()) {
      rep.diverged = true;
      break;
    }
    for (Index k = 0; k < lambda.size(); ++k) lambda[k] += cfg.beta * r[k];
  }
  rep.u = dual.primal(lambda);
  rep.lambda = std::move(lambda);
  finish(rep, t);
  return rep;
}

ConvergenceReport primal_iterate(const formulations::DualSystem& dual, const IterationConfig& cfg,
                                 const Reference* ref) {
  validate(cfg);
  const auto& trace = dual.trace();
  (void)traces::build_extension(trace);  // rejects traces without T E = I
  ConvergenceReport rep;
  rep.method = "primal";
  rep.beta = cfg.beta;
  rep.seed = cfg.seed;
  Tracker t{dual, cfg, ref, rep};
  const auto& m = dual.impedance();
  const auto& x = dual.exchange();
  const Scalar alpha = dual.alpha();
  const Vector& f = dual.f();

  Vector u = dual.primal(initial_lambda(dual.dimension(), cfg));
  const double dn = dual_norm(dual, cfg.norm, dual.rhs());
  double scale = -1.0;
  for (Index n = 0;; ++n) {
    // lambda^(n) = E^T (A u - f) + alpha M T u with E^T = T
    const Vector g = sub(dual.apply_A(u), f);
    const Vector tu = trace.apply(u);
    Vector lambda = trace.apply(g);
    const Vector mtu = m.apply(tu);
    for (Index k = 0; k < lambda.size(); ++k) lambda[k] += alpha * mtu[k];
    const Vector r = sub(dual.rhs(), dual.apply(lambda));
    const double rn = dual_norm(dual, cfg.norm, r);
    if (scale < 0.0) scale = residual_scale(dn, rn);
    t.record(n, rn / scale, lambda, u);
    rep.iterations = n;
    rep.lambda = lambda;
    if (rn / scale <= cfg.tol) {
      rep.converged = true;
      break;
    }
    if (n >= cfg.maxit) break;
    if (t.diverging()) {
      rep.diverged = true;
      break;
    }
    // u+ = (1-b) u + b A~^{-1} (f + T^T [alpha M X T u - X^T T (A u - f)])
    const Vector mxtu = m.apply(x.apply(tu));
    const Vector xttg = x.apply_transpose(trace.apply(g));
    Vector inner(mxtu.size());
    for (Index k = 0; k < inner.size(); ++k) inner[k] = alpha * mxtu[k] - xttg[k];
    Vector rhs = trace.apply_transpose(inner);
    for (Index k = 0; k < rhs.size(); ++k) rhs[k] += f[k];
    const Vector w = dual.augmented().solve(rhs);
    for (Index k = 0; k < u.size(); ++k) u[k] = (1.0 - cfg.beta) * u[k] + cfg.beta * w[k];
  }
  rep.u = u;
  finish(rep, t);
  return rep;
}

ConvergenceReport gmres_dual(const formulations::DualSystem& dual, const IterationConfig& cfg, const Reference* ref) {
  if (!(cfg.tol > 0.0)) throw ValidationError("tolerance must be positive");
  ConvergenceReport rep;
  rep.method = "gmres";
  rep.beta = cfg.beta;
  rep.seed = cfg.seed;
  const WeightedInnerProduct ip = cfg.norm == NormMode::M_inverse
                                      ? dual.impedance().inner_product(WeightedInnerProduct::Mode::M_inverse)
                                      : WeightedInnerProduct::euclidean(dual.dimension());
  const Vector x0 = initial_lambda(dual.dimension(), cfg);
  const auto start = Clock::now();
  const GmresResult g = gmres([&dual](const Vector& v) { return dual.apply(v); }, dual.rhs(), ip, cfg.tol,
                              cfg.maxit, x0);
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  for (Index n = 0; n < g.residuals.size(); ++n) {
    IterationRecord r;
    r.iteration = n;
    r.residual = g.residuals[n];
    if (cfg.timing && n + 1 == g.residuals.size()) r.wall_time = wall;
    rep.history.push_back(r);
  }
  rep.iterations = g.iterations;
  rep.converged = g.converged;
  rep.breakdown = g.breakdown;
  rep.breakdown_iteration = g.breakdown_iteration;
  rep.lambda = g.x;
  rep.u = dual.primal(g.x);
  if (!rep.history.empty()) {
    rep.history.back().primal_error = rel_primal_error(rep.u, ref);
    if (ref != nullptr && ref->lambda) {
      const Vector mu = sub(g.x, *ref->lambda);
      rep.history.back().error =
          dual_norm(dual, cfg.norm, ref->redundancy.empty() ? mu : deflate(dual, ref->redundancy, mu));
    }
  }
  rep.final_residual = g.true_residual;
  rep.final_primal_error = rel_primal_error(rep.u, ref);
  rep.rho_obs = fit_rate(g.residuals);
  return rep;
}

double fit_rate(std::span<const double> h) {
  for (double v : h.size() >= 11 ? h.subspan(h.size() - 11) : h)
    if (v == 0.0) return 0.0;
  if (h.size() < 12) return -1.0;
  const double first = h[h.size() - 11];
  const double last = h.back();
  if (!(first > 0.0)) return -1.0;
  return std::pow(last / first, 0.1);
}

bool is_diverging(std::span<const double> h, Index window) {
  if (window == 0 || h.size() < window + 1) return false;
  for (Index k = h.size() - window; k < h.size(); ++k)
    if (h[k] < h[k - 1]) return false;
  return true;
}

}  // namespace schwarzlab::solvers
