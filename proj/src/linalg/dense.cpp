#include <schwarzlab/linalg/dense.hpp>

#include <schwarzlab/linalg/kernels.hpp>

#include <algorithm>
#include <cmath>

namespace schwarzlab {

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& s) {
  DenseMatrix m(s.rows(), s.cols());
  for (const auto& t : s.triplets()) m(t.row, t.col) += t.value;
  return m;
}

DenseMatrix DenseMatrix::from_operator(Index rows, Index cols,
                                       const std::function<Vector(const Vector&)>& op) {
  DenseMatrix m(rows, cols);
  Vector e(cols, Scalar(0.0));
  for (Index j = 0; j < cols; ++j) {
    e[j] = 1.0;
    const Vector col = op(e);
    if (col.size() != rows) throw DimensionError("operator output has the wrong length");
    for (Index i = 0; i < rows; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

Vector DenseMatrix::apply(std::span<const Scalar> x) const {
  if (x.size() != cols_) throw DimensionError("dense apply dimension mismatch");
  Vector y(rows_);
  for (Index r = 0; r < rows_; ++r) y[r] = kernels::dotu(row(r), x.data(), cols_);
  return y;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (Index r = 0; r < rows_; ++r)
    for (Index c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix t(cols_, rows_);
  for (Index r = 0; r < rows_; ++r)
    for (Index c = 0; c < cols_; ++c) t(c, r) = std::conj((*this)(r, c));
  return t;
}

SparseMatrix DenseMatrix::to_sparse(double drop_tol) const {
  std::vector<Triplet> t;
  for (Index r = 0; r < rows_; ++r)
    for (Index c = 0; c < cols_; ++c)
      if (std::abs((*this)(r, c)) > drop_tol) t.push_back({r, c, (*this)(r, c)});
  return SparseMatrix::from_triplets(rows_, cols_, t);
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("dense multiply: inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k) {
      const Scalar aik = a(i, k);
      if (aik == Scalar(0.0)) continue;
      kernels::axpy(aik, b.row(k), c.row(i), b.cols());
    }
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("dense subtract: shape mismatch");
  DenseMatrix c(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("dense add: shape mismatch");
  DenseMatrix c(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

double norm2(std::span<const Scalar> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

double max_abs(std::span<const Scalar> x) {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, std::abs(v));
  return m;
}

Vector sub(std::span<const Scalar> a, std::span<const Scalar> b) {
  if (a.size() != b.size()) throw DimensionError("vector subtract: length mismatch");
  Vector c(a.size());
  for (Index i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vector add(std::span<const Scalar> a, std::span<const Scalar> b) {
  if (a.size() != b.size()) throw DimensionError("vector add: length mismatch");
  Vector c(a.size());
  for (Index i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

Vector scaled(std::span<const Scalar> a, Scalar s) {
  Vector c(a.size());
  for (Index i = 0; i < a.size(); ++i) c[i] = s * a[i];
  return c;
}

Scalar bilinear(std::span<const Scalar> a, std::span<const Scalar> b) {
  if (a.size() != b.size()) throw DimensionError("bilinear: length mismatch");
  return kernels::dotu(a.data(), b.data(), a.size());
}

}  // namespace schwarzlab
