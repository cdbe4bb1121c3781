#include <schwarzlab/linalg/sparse.hpp>

#include <schwarzlab/linalg/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace schwarzlab {

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::span<const Triplet> triplets,
                                         bool drop_zeros) {
  SparseMatrix m(rows, cols);
  std::vector<Index> order(triplets.size());
  std::iota(order.begin(), order.end(), Index{0});
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw DimensionError("triplet index out of range");
  }
  // stable sort keeps the summation order of duplicates deterministic
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto& ta = triplets[a];
    const auto& tb = triplets[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });
  m.col_.reserve(triplets.size());
  m.val_.reserve(triplets.size());
  std::vector<Index> counts(rows, 0);
  Index k = 0;
  while (k < order.size()) {
    const Triplet& t = triplets[order[k]];
    Scalar sum = t.value;
    Index j = k + 1;
    while (j < order.size() && triplets[order[j]].row == t.row && triplets[order[j]].col == t.col) {
      sum += triplets[order[j]].value;
      ++j;
    }
    if (!(drop_zeros && sum == Scalar(0.0))) {
      m.col_.push_back(t.col);
      m.val_.push_back(sum);
      ++counts[t.row];
    }
    k = j;
  }
  for (Index r = 0; r < rows; ++r) m.row_ptr_[r + 1] = m.row_ptr_[r] + counts[r];
  return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
  SparseMatrix m(n, n);
  m.col_.resize(n);
  m.val_.assign(n, Scalar(1.0));
  for (Index i = 0; i < n; ++i) {
    m.col_[i] = i;
    m.row_ptr_[i + 1] = i + 1;
  }
  m.symmetric_structure_ = true;
  return m;
}

SparseMatrix SparseMatrix::diagonal(std::span<const Scalar> d) {
  SparseMatrix m = identity(d.size());
  std::copy(d.begin(), d.end(), m.val_.begin());
  return m;
}

Scalar SparseMatrix::at(Index r, Index c) const {
  if (r >= rows_ || c >= cols_) throw DimensionError("entry index out of range");
  auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return val_[static_cast<Index>(it - col_.begin())];
}

void SparseMatrix::apply(std::span<const Scalar> x, std::span<Scalar> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw DimensionError("spmv dimension mismatch");
  kernels::active().csr_spmv(rows_, row_ptr_.data(), col_.data(), val_.data(), x.data(), y.data());
}

Vector SparseMatrix::apply(std::span<const Scalar> x) const {
  Vector y(rows_);
  apply(x, y);
  return y;
}

Vector SparseMatrix::apply_transpose(std::span<const Scalar> x) const {
  if (x.size() != rows_) throw DimensionError("transpose spmv dimension mismatch");
  Vector y(cols_, Scalar(0.0));
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_[k]] += val_[k] * x[r];
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({col_[k], r, val_[k]});
  }
  SparseMatrix m = from_triplets(cols_, rows_, t);
  m.symmetric_structure_ = symmetric_structure_;
  return m;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({r, col_[k], val_[k]});
  }
  return t;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (std::abs(val_[k] - at(col_[k], r)) > tol) return false;
    }
  }
  return true;
}

bool SparseMatrix::is_real(double tol) const {
  return std::all_of(val_.begin(), val_.end(), [tol](const Scalar& v) { return std::abs(v.imag()) <= tol; });
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : val_) m = std::max(m, std::abs(v));
  return m;
}

void SparseMatrix::set_symmetric_structure(bool flag) {
  if (flag) {
    if (rows_ != cols_) throw DimensionError("symmetric structure requires a square matrix");
    for (Index r = 0; r < rows_; ++r) {
      for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        const Index c = col_[k];
        auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[c]);
        auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[c + 1]);
        if (!std::binary_search(first, last, r)) throw Error("pattern is not structurally symmetric");
      }
    }
  }
  symmetric_structure_ = flag;
}

Vector spmv(const SparseMatrix& a, std::span<const Scalar> x) { return a.apply(x); }

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, Scalar alpha, Scalar beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("add: shape mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (auto x : a.triplets()) t.push_back({x.row, x.col, alpha * x.value});
  for (auto x : b.triplets()) t.push_back({x.row, x.col, beta * x.value});
  return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

SparseMatrix scale(const SparseMatrix& a, Scalar s) {
  SparseMatrix m = a;
  for (auto& v : m.values()) v *= s;
  return m;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
  std::vector<Triplet> t;
  const auto& ap = a.row_ptr();
  const auto& ac = a.col_idx();
  const auto& av = a.values();
  const auto& bp = b.row_ptr();
  const auto& bc = b.col_idx();
  const auto& bv = b.values();
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index k = ap[r]; k < ap[r + 1]; ++k) {
      const Index mid = ac[k];
      for (Index l = bp[mid]; l < bp[mid + 1]; ++l) t.push_back({r, bc[l], av[k] * bv[l]});
    }
  }
  return SparseMatrix::from_triplets(a.rows(), b.cols(), t);
}

SparseMatrix block_diagonal(std::span<const SparseMatrix> blocks) {
  Index rows = 0, cols = 0;
  std::vector<Triplet> t;
  for (const auto& b : blocks) {
    for (auto x : b.triplets()) t.push_back({x.row + rows, x.col + cols, x.value});
    rows += b.rows();
    cols += b.cols();
  }
  return SparseMatrix::from_triplets(rows, cols, t);
}

}  // namespace schwarzlab
