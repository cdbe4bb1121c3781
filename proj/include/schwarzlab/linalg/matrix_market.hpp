#pragma once

#include <schwarzlab/linalg/dense.hpp>

#include <iosfwd>
#include <string>

namespace schwarzlab {

// Coordinate format. Writing always produces "complex general" with 17
// significant digits; reading also accepts real/integer/pattern fields and
// symmetric/skew-symmetric/hermitian storage.
void write_matrix_market(std::ostream& os, const SparseMatrix& a, const std::string& comment = {});
void write_matrix_market(const std::string& path, const SparseMatrix& a, const std::string& comment = {});
void write_matrix_market(const std::string& path, const DenseMatrix& a, const std::string& comment = {});
void write_matrix_market(const std::string& path, std::span<const Scalar> v, const std::string& comment = {});

SparseMatrix read_matrix_market(std::istream& is);
SparseMatrix read_matrix_market(const std::string& path);

}  // namespace schwarzlab
