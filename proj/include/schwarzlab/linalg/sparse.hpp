#pragma once

#include <schwarzlab/linalg/types.hpp>

#include <span>
#include <tuple>

namespace schwarzlab {

struct Triplet {
  Index row;
  Index col;
  Scalar value;
};

// Compressed row storage. Columns are sorted within each row and unique.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  // Duplicates are summed in the order they appear. Explicit zeros are kept
  // unless drop_zeros is set.
  static SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets,
                                    bool drop_zeros = false);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(std::span<const Scalar> d);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return val_.size(); }

  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_; }
  const std::vector<Scalar>& values() const { return val_; }
  std::vector<Scalar>& values() { return val_; }

  // Entry lookup by binary search; zero when absent.
  Scalar at(Index r, Index c) const;

  Vector apply(std::span<const Scalar> x) const;
  void apply(std::span<const Scalar> x, std::span<Scalar> y) const;
  // y = A^T x (no conjugation)
  Vector apply_transpose(std::span<const Scalar> x) const;

  SparseMatrix transpose() const;
  std::vector<Triplet> triplets() const;

  bool is_symmetric(double tol = 0.0) const;
  bool is_real(double tol = 0.0) const;
  double max_abs() const;

  // Marks structural symmetry; checked against the pattern when set.
  void set_symmetric_structure(bool flag);
  bool symmetric_structure() const { return symmetric_structure_; }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_;
  std::vector<Scalar> val_;
  bool symmetric_structure_ = false;
};

Vector spmv(const SparseMatrix& a, std::span<const Scalar> x);

// a*A + b*B with matching shapes.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, Scalar alpha = 1.0, Scalar beta = 1.0);
SparseMatrix scale(const SparseMatrix& a, Scalar s);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix block_diagonal(std::span<const SparseMatrix> blocks);

}  // namespace schwarzlab
