#pragma once

#include <schwarzlab/linalg/sparse.hpp>

#include <functional>

namespace schwarzlab {

// Row-major dense matrix used for diagnostics and small interface solves.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(rows * cols, Scalar(0.0)) {}

  static DenseMatrix identity(Index n);
  static DenseMatrix from_sparse(const SparseMatrix& s);
  // Columns are op(e_j) for j = 0..n-1.
  static DenseMatrix from_operator(Index rows, Index cols,
                                   const std::function<Vector(const Vector&)>& op);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Scalar& operator()(Index r, Index c) { return data_[r * cols_ + c]; }
  const Scalar& operator()(Index r, Index c) const { return data_[r * cols_ + c]; }
  Scalar* row(Index r) { return data_.data() + r * cols_; }
  const Scalar* row(Index r) const { return data_.data() + r * cols_; }

  Vector apply(std::span<const Scalar> x) const;
  DenseMatrix transpose() const;
  DenseMatrix adjoint() const;
  SparseMatrix to_sparse(double drop_tol = 0.0) const;
  double max_abs() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Scalar> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);

// Vector helpers.
double norm2(std::span<const Scalar> x);
double max_abs(std::span<const Scalar> x);
Vector sub(std::span<const Scalar> a, std::span<const Scalar> b);
Vector add(std::span<const Scalar> a, std::span<const Scalar> b);
Vector scaled(std::span<const Scalar> a, Scalar s);
// sum a_k b_k, no conjugation
Scalar bilinear(std::span<const Scalar> a, std::span<const Scalar> b);

}  // namespace schwarzlab
