#pragma once

#include <schwarzlab/linalg/dense.hpp>

namespace schwarzlab {

inline constexpr double kPivotTolerance = 1e-12;
inline constexpr Index kDenseThreshold = 20000;

// LU with partial pivoting, stored densely inside the band implied by the
// sparsity pattern (lower bandwidth kl, upper bandwidth ku + kl for fill from
// row swaps). A full pattern degenerates to an ordinary dense LU.
class DenseFactorization {
 public:
  DenseFactorization() = default;

  Index size() const { return n_; }
  Index lower_bandwidth() const { return kl_; }
  Index upper_bandwidth() const { return ku_; }

  Vector solve(std::span<const Scalar> b) const;
  void solve_in_place(std::span<Scalar> b) const;
  // Solves A^T x = b (plain transpose).
  Vector solve_transpose(std::span<const Scalar> b) const;

  // P^T L U multiplied out; for tests.
  DenseMatrix reconstruct() const;

  friend DenseFactorization factorize(const SparseMatrix& a, Index dense_threshold);
  friend DenseFactorization factorize(const DenseMatrix& a, Index dense_threshold);

 private:
  void eliminate(double max_entry);
  Scalar& at(Index r, Index c) { return band_[r * width_ + (c + kl_ - r)]; }
  const Scalar& at(Index r, Index c) const { return band_[r * width_ + (c + kl_ - r)]; }
  // last column stored for row r
  Index row_end(Index r) const { return std::min(n_, r + ku_ + kl_ + 1); }

  Index n_ = 0;
  Index kl_ = 0;
  Index ku_ = 0;
  Index width_ = 1;
  std::vector<Scalar> band_;
  std::vector<Index> piv_;
};

// Throws SingularMatrixError when a pivot is below kPivotTolerance times the
// largest entry of A, and ValidationError when A exceeds dense_threshold.
DenseFactorization factorize(const SparseMatrix& a, Index dense_threshold = kDenseThreshold);
DenseFactorization factorize(const DenseMatrix& a, Index dense_threshold = kDenseThreshold);
Vector solve(const DenseFactorization& f, std::span<const Scalar> b);

}  // namespace schwarzlab
