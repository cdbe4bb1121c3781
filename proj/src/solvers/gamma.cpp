#include <schwarzlab/solvers/gamma.hpp>

#include <schwarzlab/linalg/spectral.hpp>

#include <algorithm>
#include <cmath>

namespace schwarzlab::solvers {

double estimate_gamma(const formulations::DualSystem& dual, const std::vector<Vector>& redundancy) {
  const Index n = dual.dimension();
  const DenseMatrix k = dual.dense_operator();
  const SpdRoots roots = spd_roots(DenseMatrix::from_sparse(dual.impedance().compound()));
  DenseMatrix z(n, redundancy.size());
  for (Index j = 0; j < redundancy.size(); ++j)
    for (Index i = 0; i < n; ++i) z(i, j) = redundancy[j][i];
  const DenseMatrix q = orthogonal_complement(roots.inv_sqrt * z, n);
  if (q.cols() == 0) return 0.0;
  const auto s = singular_values(roots.inv_sqrt * k * roots.sqrt * q);
  return s.empty() ? 0.0 : s.back();
}

double richardson_bound(double beta, double gamma) {
  return std::sqrt(std::max(0.0, 1.0 - (1.0 - beta) * beta * gamma * gamma));
}

double gmres_bound(double gamma) { return std::sqrt(std::max(0.0, 1.0 - gamma * gamma / 4.0)); }

GammaBound gamma_lower_bound(const formulations::Instance& inst) {
  GammaBound b;
  const auto& local = inst.dec.local;
  b.C_R = std::sqrt(static_cast<double>(inst.dec.mult.mu_max));
  for (int i = 0; i < inst.num_subdomains(); ++i) {
    b.C_A = std::max(b.C_A, spectral_norm(DenseMatrix::from_sparse(local.A(i))));
    const SparseMatrix& t = inst.trace.T(i);
    const SparseMatrix& m = inst.impedance.M(i);
    if (t.rows() == 0) continue;
    const SparseMatrix tmt = multiply(t.transpose(), multiply(m, t));
    b.C_T = std::max(b.C_T, std::sqrt(spectral_norm(DenseMatrix::from_sparse(tmt))));
    const DenseMatrix mi = spd_roots(DenseMatrix::from_sparse(m)).inv_sqrt;
    const DenseMatrix ttt = DenseMatrix::from_sparse(multiply(t, t.transpose()));
    b.C_E = std::max(b.C_E, std::sqrt(spectral_norm(mi * ttt * mi)));
  }
  const auto& p = inst.problem;
  const auto s = singular_values(DenseMatrix::from_sparse(meshfem::combine(p.A0, p.A1, p.A2, p.wave)));
  b.c_hat = s.empty() ? 0.0 : s.back();
  const double lead = std::pow(b.C_A * b.C_E + b.C_T, 2) * b.C_R * b.C_R;
  if (b.c_hat > 0.0) {
    b.gamma_formula = 2.0 / (lead / b.c_hat + b.C_A * b.C_E * b.C_E + 1.0);
    b.gamma_simple = lead > 0.0 ? b.c_hat / lead : 0.0;
  }
  return b;
}

double coercivity_ratio(const formulations::DualSystem& dual, int probes, unsigned long long seed) {
  double best = std::numeric_limits<double>::infinity();
  const auto& m = dual.impedance();
  for (int p = 0; p < probes; ++p) {
    const Vector l = traces::random_vector(dual.dimension(), seed + p);
    const Vector ml = m.apply_inverse(l);
    const Vector kl = dual.apply(l);
    Scalar s = 0.0;
    for (Index i = 0; i < l.size(); ++i) s += std::conj(ml[i]) * kl[i];
    const double den = m.inverse_norm_squared(l);
    if (den > 0.0) best = std::min(best, s.real() / den);
  }
  return best;
}

Index dual_kernel_dimension(const formulations::DualSystem& dual, double rel_tol) {
  return nullspace_dimension(dual.dense_operator(), rel_tol);
}

}  // namespace schwarzlab::solvers
