#pragma once

#include <schwarzlab/traces/impedance.hpp>

#include <functional>
#include <memory>

namespace schwarzlab::formulations {

// Runs body(i) for every subdomain, on worker threads when `parallel` is set.
// Each call writes only to its own block, so results do not depend on the
// schedule.
void for_each_subdomain(int count, bool parallel, const std::function<void(int)>& body);

// Per-subdomain A_i + alpha T_i^T M_i T_i together with its factorization.
class AugmentedLocal {
 public:
  AugmentedLocal() = default;
  AugmentedLocal(const decomp::LocalOperators& local, const traces::TraceOperator& trace,
                 const traces::ImpedanceOperator& impedance, Scalar alpha, bool parallel = false);
  // Already augmented blocks (FETI-H).
  AugmentedLocal(std::vector<SparseMatrix> blocks, Scalar alpha, bool parallel = false);

  Scalar alpha() const { return alpha_; }
  bool parallel() const { return parallel_; }
  int num_subdomains() const { return static_cast<int>(blocks_.size()); }
  const SparseMatrix& matrix(int i) const { return blocks_[i]; }
  const std::vector<SparseMatrix>& blocks() const { return blocks_; }
  const std::vector<Index>& offsets() const { return offsets_; }
  Index dimension() const { return offsets_.back(); }

  Vector solve_local(int i, std::span<const Scalar> b) const;
  // block-diagonal solve of a stacked vector
  Vector solve(std::span<const Scalar> b) const;
  Vector apply(std::span<const Scalar> u) const;

 private:
  void factor_all();

  Scalar alpha_ = 1.0;
  bool parallel_ = false;
  std::vector<SparseMatrix> blocks_;
  std::vector<std::shared_ptr<const DenseFactorization>> factors_;
  std::vector<Index> offsets_{0};
};

}  // namespace schwarzlab::formulations
