#include <schwarzlab/linalg/spectral.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>

namespace schwarzlab {

namespace {

using EMat = Eigen::MatrixXcd;

EMat to_eigen(const DenseMatrix& a) {
  EMat m(a.rows(), a.cols());
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c) m(r, c) = a(r, c);
  return m;
}

DenseMatrix from_eigen(const EMat& m) {
  DenseMatrix a(m.rows(), m.cols());
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c) a(r, c) = m(r, c);
  return a;
}

}  // namespace

std::vector<double> singular_values(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return {};
  Eigen::BDCSVD<EMat> svd(to_eigen(a));
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

Index matrix_rank(const DenseMatrix& a, double rel_tol) {
  const auto s = singular_values(a);
  if (s.empty() || s.front() == 0.0) return 0;
  return static_cast<Index>(std::count_if(s.begin(), s.end(), [&](double v) { return v > rel_tol * s.front(); }));
}

Index nullspace_dimension(const DenseMatrix& a, double rel_tol) { return a.cols() - matrix_rank(a, rel_tol); }

DenseMatrix nullspace_basis(const DenseMatrix& a, double rel_tol) {
  const Index n = a.cols();
  if (n == 0) return DenseMatrix(0, 0);
  if (a.rows() == 0) return DenseMatrix::identity(n);
  Eigen::BDCSVD<EMat> svd(to_eigen(a), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Index rank = 0;
  const double smax = s.size() > 0 ? s(0) : 0.0;
  for (Index i = 0; i < static_cast<Index>(s.size()); ++i)
    if (smax > 0.0 && s(i) > rel_tol * smax) ++rank;
  const EMat& v = svd.matrixV();
  return from_eigen(v.rightCols(n - rank));
}

std::vector<double> hermitian_eigenvalues(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("hermitian_eigenvalues: square matrix required");
  if (a.rows() == 0) return {};
  const EMat m = to_eigen(a);
  const EMat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<EMat> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

SpdRoots spd_roots(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("spd_roots: square matrix required");
  const EMat m = to_eigen(a);
  Eigen::SelfAdjointEigenSolver<EMat> es(0.5 * (m + m.adjoint()));
  const auto& ev = es.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() <= 0.0) throw Error("spd_roots: matrix is not positive definite");
  const EMat& q = es.eigenvectors();
  const Eigen::VectorXd s = ev.cwiseSqrt();
  const Eigen::VectorXd is = s.cwiseInverse();
  SpdRoots r;
  r.sqrt = from_eigen(q * s.asDiagonal() * q.adjoint());
  r.inv_sqrt = from_eigen(q * is.asDiagonal() * q.adjoint());
  return r;
}

DenseMatrix orthogonal_complement(const DenseMatrix& b, Index n) {
  if (b.cols() == 0) return DenseMatrix::identity(n);
  if (b.rows() != n) throw DimensionError("orthogonal_complement: row count mismatch");
  Eigen::HouseholderQR<EMat> qr(to_eigen(b));
  const EMat q = qr.householderQ() * EMat::Identity(n, n);
  return from_eigen(q.rightCols(n - b.cols()));
}

Vector least_squares(const DenseMatrix& a, std::span<const Scalar> rhs) {
  if (rhs.size() != a.rows()) throw DimensionError("least_squares: right-hand side has the wrong length");
  Eigen::VectorXcd b(rhs.size());
  for (Index i = 0; i < rhs.size(); ++i) b(i) = rhs[i];
  Eigen::CompleteOrthogonalDecomposition<EMat> cod(to_eigen(a));
  cod.setThreshold(1e-12);
  const Eigen::VectorXcd x = cod.solve(b);
  return Vector(x.data(), x.data() + x.size());
}

double spectral_norm(const DenseMatrix& a) {
  const auto s = singular_values(a);
  return s.empty() ? 0.0 : s.front();
}

}  // namespace schwarzlab
