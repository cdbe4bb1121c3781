#include <schwarzlab/formulations/dual.hpp>

#include <algorithm>
#include <cmath>

namespace schwarzlab::formulations {

DualSystem::DualSystem(const decomp::LocalOperators& local, const traces::TraceOperator& trace,
                       const traces::ImpedanceOperator& impedance, const traces::ExchangeOperator& exchange,
                       Scalar alpha, bool parallel)
    : local_(&local), trace_(&trace), m_(&impedance), x_(&exchange),
      aug_(local, trace, impedance, alpha, parallel) {
  if (exchange.dimension() != trace.dimension() || impedance.dimension() != trace.dimension())
    throw DimensionError("dual system: trace, impedance and exchange dimensions differ");
  for (int i = 0; i < trace.num_subdomains(); ++i) {
    a_.push_back(local.A(i));
    f_.insert(f_.end(), local.f[i].begin(), local.f[i].end());
  }
  simplified_ = traces::satisfies_m_invariance(exchange, impedance);
  if (!simplified_) {
    // M + X^T M X must be invertible for the general form
    const DenseMatrix x = exchange.dense();
    const DenseMatrix m = DenseMatrix::from_sparse(impedance.compound());
    try {
      (void)factorize(m + x.transpose() * m * x);
    } catch (const SingularMatrixError&) {
      throw AssumptionError("M + X^T M X is singular; the impedance sum must have a bounded inverse");
    }
  }
  const Vector w = trace.apply(aug_.solve(f_));
  d_ = exchange.apply_transpose(impedance_sum(w));
}

DualSystem::DualSystem(const Instance& inst, bool parallel)
    : DualSystem(inst.dec.local, inst.trace, inst.impedance, inst.exchange, inst.alpha, parallel) {}

Vector DualSystem::impedance_sum(std::span<const Scalar> w) const {
  const Scalar a = alpha();
  Vector mw = m_->apply(w);
  if (simplified_) {
    for (auto& v : mw) v *= 2.0 * a;
    return mw;
  }
  const Vector xtmxw = x_->apply_transpose(m_->apply(x_->apply(w)));
  for (Index k = 0; k < mw.size(); ++k) mw[k] = a * (mw[k] + xtmxw[k]);
  return mw;
}

Vector DualSystem::apply_S(std::span<const Scalar> lambda) const {
  if (lambda.size() != dimension()) throw DimensionError("scattering: vector has the wrong length");
  const auto& off = trace_->lambda_offsets();
  if (simplified_) {
    // block diagonal: S_i = -I + 2 alpha M_i T_i A~_i^{-1} T_i^T
    Vector out(lambda.size());
    const Scalar two_a = 2.0 * alpha();
    for_each_subdomain(trace_->num_subdomains(), aug_.parallel(), [&](int i) {
      const auto li = traces::block(lambda, off, i);
      const Vector v = aug_.solve_local(i, trace_->apply_transpose_local(i, li));
      const Vector mtv = m_->apply_local(i, trace_->apply_local(i, v));
      for (Index k = 0; k < li.size(); ++k) out[off[i] + k] = two_a * mtv[k] - li[k];
    });
    return out;
  }
  const Vector w = trace_->apply(homogeneous(lambda));
  Vector s = impedance_sum(w);
  for (Index k = 0; k < s.size(); ++k) s[k] -= lambda[k];
  return s;
}

Vector DualSystem::apply_XtS(std::span<const Scalar> lambda) const { return x_->apply_transpose(apply_S(lambda)); }

Vector DualSystem::apply(std::span<const Scalar> lambda) const {
  const Vector xs = apply_XtS(lambda);
  Vector out(lambda.size());
  for (Index k = 0; k < out.size(); ++k) out[k] = lambda[k] - xs[k];
  return out;
}

Vector DualSystem::primal(std::span<const Scalar> lambda) const {
  Vector rhs = trace_->apply_transpose(lambda);
  for (Index k = 0; k < rhs.size(); ++k) rhs[k] += f_[k];
  return aug_.solve(rhs);
}

Vector DualSystem::homogeneous(std::span<const Scalar> lambda) const {
  return aug_.solve(trace_->apply_transpose(lambda));
}

Vector DualSystem::apply_A(std::span<const Scalar> u) const {
  const auto& off = aug_.offsets();
  Vector out(u.size());
  for (int i = 0; i < trace_->num_subdomains(); ++i) {
    const Vector y = a_[i].apply(traces::block(u, off, i));
    std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(off[i]));
  }
  return out;
}

double DualSystem::pseudo_energy_of(std::span<const Scalar> v) const {
  const Vector av = apply_A(v);
  Scalar z = 0.0;
  for (Index k = 0; k < v.size(); ++k) z += av[k] * std::conj(v[k]);
  return (std::conj(alpha()) * z).real();
}

PseudoEnergy DualSystem::pseudo_energy(std::span<const Scalar> lambda) const {
  PseudoEnergy e;
  e.lambda_norm2 = m_->inverse_norm_squared(lambda);
  e.s_norm2 = m_->inverse_norm_squared(apply_S(lambda));
  e.p = pseudo_energy_of(homogeneous(lambda));
  e.defect = std::abs(e.s_norm2 + 4.0 * e.p - e.lambda_norm2);
  return e;
}

DenseMatrix DualSystem::dense_S() const {
  return DenseMatrix::from_operator(dimension(), dimension(), [this](const Vector& v) { return apply_S(v); });
}

DenseMatrix DualSystem::dense_operator() const {
  return DenseMatrix::from_operator(dimension(), dimension(), [this](const Vector& v) { return apply(v); });
}

}  // namespace schwarzlab::formulations
