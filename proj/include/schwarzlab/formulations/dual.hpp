#pragma once

#include <schwarzlab/formulations/augmented.hpp>
#include <schwarzlab/formulations/instance.hpp>

namespace schwarzlab::formulations {

struct PseudoEnergy {
  double s_norm2 = 0.0;       // ||S l||^2 in M^{-1}
  double lambda_norm2 = 0.0;  // ||l||^2 in M^{-1}
  double p = 0.0;
  double defect = 0.0;        // | ||S l||^2 + 4p - ||l||^2 |
};

// Schur system (I - X^T S) l = d on the dual trace space. The referenced
// operators must outlive the system.
class DualSystem {
 public:
  DualSystem(const decomp::LocalOperators& local, const traces::TraceOperator& trace,
             const traces::ImpedanceOperator& impedance, const traces::ExchangeOperator& exchange, Scalar alpha,
             bool parallel = false);
  explicit DualSystem(const Instance& inst, bool parallel = false);

  Index dimension() const { return trace_->dimension(); }
  Scalar alpha() const { return aug_.alpha(); }
  // X^T M X = M holds, so the simplified S and d are in use
  bool simplified() const { return simplified_; }

  Vector apply_S(std::span<const Scalar> lambda) const;
  Vector apply_XtS(std::span<const Scalar> lambda) const;
  // (I - X^T S) lambda
  Vector apply(std::span<const Scalar> lambda) const;
  const Vector& rhs() const { return d_; }

  // (A + alpha T^T M T)^{-1} (f + T^T lambda)
  Vector primal(std::span<const Scalar> lambda) const;
  // (A + alpha T^T M T)^{-1} T^T lambda
  Vector homogeneous(std::span<const Scalar> lambda) const;
  // Re(conj(alpha) <A v, conj(v)>)
  double pseudo_energy_of(std::span<const Scalar> v) const;
  PseudoEnergy pseudo_energy(std::span<const Scalar> lambda) const;

  DenseMatrix dense_S() const;
  DenseMatrix dense_operator() const;

  const AugmentedLocal& augmented() const { return aug_; }
  const traces::TraceOperator& trace() const { return *trace_; }
  const traces::ImpedanceOperator& impedance() const { return *m_; }
  const traces::ExchangeOperator& exchange() const { return *x_; }
  const decomp::LocalOperators& local() const { return *local_; }
  const Vector& f() const { return f_; }
  // A u (block diagonal, stacked)
  Vector apply_A(std::span<const Scalar> u) const;

 private:
  // alpha (M + X^T M X) w in general form, 2 alpha M w when simplified
  Vector impedance_sum(std::span<const Scalar> w) const;

  const decomp::LocalOperators* local_;
  const traces::TraceOperator* trace_;
  const traces::ImpedanceOperator* m_;
  const traces::ExchangeOperator* x_;
  AugmentedLocal aug_;
  std::vector<SparseMatrix> a_;
  bool simplified_ = true;
  Vector f_;
  Vector d_;
};

}  // namespace schwarzlab::formulations
