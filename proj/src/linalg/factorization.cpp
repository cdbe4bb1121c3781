#include <schwarzlab/linalg/factorization.hpp>

#include <schwarzlab/linalg/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace schwarzlab {

namespace {

void check_size(Index rows, Index cols, Index threshold) {
  if (rows != cols) throw DimensionError("factorize: matrix must be square");
  if (rows > threshold) {
    throw ValidationError("factorize: " + std::to_string(rows) + " dofs exceed the dense threshold of " +
                          std::to_string(threshold));
  }
}

}  // namespace

DenseFactorization factorize(const SparseMatrix& a, Index dense_threshold) {
  check_size(a.rows(), a.cols(), dense_threshold);
  DenseFactorization f;
  f.n_ = a.rows();
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  for (Index r = 0; r < f.n_; ++r) {
    for (Index k = rp[r]; k < rp[r + 1]; ++k) {
      const Index c = ci[k];
      if (c < r) f.kl_ = std::max(f.kl_, r - c);
      else f.ku_ = std::max(f.ku_, c - r);
    }
  }
  f.width_ = 2 * f.kl_ + f.ku_ + 1;
  f.band_.assign(f.n_ * f.width_, Scalar(0.0));
  for (Index r = 0; r < f.n_; ++r) {
    for (Index k = rp[r]; k < rp[r + 1]; ++k) f.at(r, ci[k]) = a.values()[k];
  }
  f.eliminate(a.max_abs());
  return f;
}

DenseFactorization factorize(const DenseMatrix& a, Index dense_threshold) {
  check_size(a.rows(), a.cols(), dense_threshold);
  DenseFactorization f;
  f.n_ = a.rows();
  for (Index r = 0; r < f.n_; ++r) {
    for (Index c = 0; c < f.n_; ++c) {
      if (a(r, c) == Scalar(0.0)) continue;
      if (c < r) f.kl_ = std::max(f.kl_, r - c);
      else f.ku_ = std::max(f.ku_, c - r);
    }
  }
  f.width_ = 2 * f.kl_ + f.ku_ + 1;
  f.band_.assign(f.n_ * f.width_, Scalar(0.0));
  for (Index r = 0; r < f.n_; ++r) {
    const Index lo = r > f.kl_ ? r - f.kl_ : 0;
    const Index hi = std::min(f.n_, r + f.ku_ + 1);
    for (Index c = lo; c < hi; ++c) f.at(r, c) = a(r, c);
  }
  f.eliminate(a.max_abs());
  return f;
}

void DenseFactorization::eliminate(double max_entry) {
  piv_.resize(n_);
  const double tol = kPivotTolerance * max_entry;
  const auto& k = kernels::active();
  for (Index j = 0; j < n_; ++j) {
    const Index last = std::min(n_ - 1, j + kl_);
    Index p = j;
    double best = std::abs(at(j, j));
    for (Index r = j + 1; r <= last; ++r) {
      const double v = std::abs(at(r, j));
      if (v > best) {
        best = v;
        p = r;
      }
    }
    if (!(best > tol) || max_entry == 0.0) {
      throw SingularMatrixError("factorize: pivot " + std::to_string(j) + " below tolerance", j);
    }
    piv_[j] = p;
    const Index end = row_end(j);
    if (p != j) {
      for (Index c = j; c < end; ++c) std::swap(at(j, c), at(p, c));
    }
    const Scalar inv = Scalar(1.0) / at(j, j);
    for (Index r = j + 1; r <= last; ++r) {
      Scalar& l = at(r, j);
      if (l == Scalar(0.0)) continue;
      l *= inv;
      if (end > j + 1) k.axpy(-l, &at(j, j + 1), &at(r, j + 1), end - j - 1);
    }
  }
}

void DenseFactorization::solve_in_place(std::span<Scalar> b) const {
  if (b.size() != n_) throw DimensionError("solve: right-hand side has the wrong length");
  for (Index j = 0; j < n_; ++j) {
    if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
    const Index last = std::min(n_ - 1, j + kl_);
    const Scalar bj = b[j];
    if (bj == Scalar(0.0)) continue;
    for (Index r = j + 1; r <= last; ++r) b[r] -= at(r, j) * bj;
  }
  const auto& k = kernels::active();
  for (Index j = n_; j-- > 0;) {
    const Index end = row_end(j);
    Scalar s = b[j];
    if (end > j + 1) s -= k.dotu(&at(j, j + 1), &b[j + 1], end - j - 1);
    b[j] = s / at(j, j);
  }
}

Vector DenseFactorization::solve(std::span<const Scalar> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

Vector DenseFactorization::solve_transpose(std::span<const Scalar> b) const {
  if (b.size() != n_) throw DimensionError("solve_transpose: right-hand side has the wrong length");
  // A = P^T L U, so A^T = U^T L^T P.
  Vector x(b.begin(), b.end());
  for (Index j = 0; j < n_; ++j) {
    x[j] /= at(j, j);
    const Scalar xj = x[j];
    const Index end = row_end(j);
    for (Index c = j + 1; c < end; ++c) x[c] -= at(j, c) * xj;
  }
  for (Index j = n_; j-- > 0;) {
    const Index last = std::min(n_ - 1, j + kl_);
    Scalar s = x[j];
    for (Index r = j + 1; r <= last; ++r) s -= at(r, j) * x[r];
    x[j] = s;
    if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
  }
  return x;
}

DenseMatrix DenseFactorization::reconstruct() const {
  // A = P_0 L_0 P_1 L_1 ... P_{n-1} L_{n-1} U with the multipliers of column j
  // stored unswapped, as in banded LAPACK.
  DenseMatrix x(n_, n_);
  for (Index r = 0; r < n_; ++r)
    for (Index c = r; c < row_end(r); ++c) x(r, c) = at(r, c);
  for (Index j = n_; j-- > 0;) {
    const Index last = std::min(n_ - 1, j + kl_);
    for (Index r = j + 1; r <= last; ++r) {
      const Scalar l = at(r, j);
      if (l == Scalar(0.0)) continue;
      for (Index c = 0; c < n_; ++c) x(r, c) += l * x(j, c);
    }
    if (piv_[j] != j) {
      for (Index c = 0; c < n_; ++c) std::swap(x(j, c), x(piv_[j], c));
    }
  }
  return x;
}

Vector solve(const DenseFactorization& f, std::span<const Scalar> b) { return f.solve(b); }

}  // namespace schwarzlab
