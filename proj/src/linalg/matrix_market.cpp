#include <schwarzlab/linalg/matrix_market.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace schwarzlab {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& os, Index rows, Index cols, Index nnz, const std::string& comment) {
  os << "%%MatrixMarket matrix coordinate complex general\n";
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string line;
    while (std::getline(lines, line)) os << "% " << line << '\n';
  }
  os << rows << ' ' << cols << ' ' << nnz << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  return os;
}

}  // namespace

void write_matrix_market(std::ostream& os, const SparseMatrix& a, const std::string& comment) {
  write_header(os, a.rows(), a.cols(), a.nnz(), comment);
  for (const auto& t : a.triplets()) {
    os << t.row + 1 << ' ' << t.col + 1 << ' ' << fmt(t.value.real()) << ' ' << fmt(t.value.imag()) << '\n';
  }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a, const std::string& comment) {
  auto os = open_out(path);
  write_matrix_market(os, a, comment);
}

void write_matrix_market(const std::string& path, const DenseMatrix& a, const std::string& comment) {
  write_matrix_market(path, a.to_sparse(), comment);
}

void write_matrix_market(const std::string& path, std::span<const Scalar> v, const std::string& comment) {
  std::vector<Triplet> t;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != Scalar(0.0)) t.push_back({i, 0, v[i]});
  write_matrix_market(path, SparseMatrix::from_triplets(v.size(), 1, t), comment);
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("matrix market: empty input");
  std::istringstream head(line);
  std::string banner, object, format, field, symmetry;
  head >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") throw Error("matrix market: bad banner");
  if (lower(format) != "coordinate") throw Error("matrix market: only coordinate format is supported");
  field = lower(field);
  symmetry = lower(symmetry);
  const bool is_complex = field == "complex";
  const bool is_pattern = field == "pattern";
  if (!is_complex && !is_pattern && field != "real" && field != "integer" && field != "double") {
    throw Error("matrix market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" && symmetry != "hermitian") {
    throw Error("matrix market: unsupported symmetry '" + symmetry + "'");
  }
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  Index rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream size(line);
    if (!(size >> rows >> cols >> nnz)) throw Error("matrix market: bad size line");
  }
  std::vector<Triplet> t;
  t.reserve(symmetry == "general" ? nnz : 2 * nnz);
  for (Index k = 0; k < nnz; ++k) {
    Index r, c;
    double re = 1.0, im = 0.0;
    if (!(is >> r >> c)) throw Error("matrix market: truncated entry list");
    if (!is_pattern && !(is >> re)) throw Error("matrix market: missing value");
    if (is_complex && !(is >> im)) throw Error("matrix market: missing imaginary part");
    if (r < 1 || c < 1 || r > rows || c > cols) throw Error("matrix market: index out of range");
    const Scalar v(re, im);
    t.push_back({r - 1, c - 1, v});
    if (r != c) {
      if (symmetry == "symmetric") t.push_back({c - 1, r - 1, v});
      else if (symmetry == "skew-symmetric") t.push_back({c - 1, r - 1, -v});
      else if (symmetry == "hermitian") t.push_back({c - 1, r - 1, std::conj(v)});
    }
  }
  return SparseMatrix::from_triplets(rows, cols, t);
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_matrix_market(is);
}

}  // namespace schwarzlab
