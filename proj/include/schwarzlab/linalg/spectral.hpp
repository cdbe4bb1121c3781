#pragma once

#include <schwarzlab/linalg/dense.hpp>

namespace schwarzlab {

// Dense SVD / Hermitian eigen helpers for diagnostics (backed by Eigen).

// Descending singular values.
std::vector<double> singular_values(const DenseMatrix& a);
// Number of singular values <= rel_tol * sigma_max (plus the column
// deficit for wide matrices).
Index nullspace_dimension(const DenseMatrix& a, double rel_tol = 1e-10);
// Orthonormal basis of ker(a) as columns.
DenseMatrix nullspace_basis(const DenseMatrix& a, double rel_tol = 1e-10);
Index matrix_rank(const DenseMatrix& a, double rel_tol = 1e-10);

// Ascending eigenvalues of the Hermitian part of a.
std::vector<double> hermitian_eigenvalues(const DenseMatrix& a);

// Symmetric positive definite square root and inverse square root.
struct SpdRoots {
  DenseMatrix sqrt;
  DenseMatrix inv_sqrt;
};
SpdRoots spd_roots(const DenseMatrix& a);

// Orthonormal basis (columns) of the orthogonal complement of range(b).
DenseMatrix orthogonal_complement(const DenseMatrix& b, Index n);

// Minimum-norm least-squares solution of a x = rhs.
Vector least_squares(const DenseMatrix& a, std::span<const Scalar> rhs);

double spectral_norm(const DenseMatrix& a);

}  // namespace schwarzlab
