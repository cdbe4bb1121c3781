#include "helpers.hpp"

#include <schwarzlab/linalg/gmres.hpp>
#include <schwarzlab/linalg/kernels.hpp>
#include <schwarzlab/linalg/matrix_market.hpp>
#include <schwarzlab/linalg/spectral.hpp>

#include <sstream>

using namespace schwarzlab;
using testing::random_complex;

namespace {

SparseMatrix dense_to_sparse(std::initializer_list<std::initializer_list<Scalar>> rows) {
  std::vector<Triplet> t;
  Index r = 0, cols = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (const auto& v : row) {
      if (v != Scalar(0.0)) t.push_back({r, c, v});
      ++c;
    }
    cols = std::max(cols, c);
    ++r;
  }
  return SparseMatrix::from_triplets(r, cols, t);
}

SparseMatrix random_sparse(Index n, unsigned seed, double density) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i == j || std::abs(u(gen)) < density) t.push_back({i, j, Scalar(u(gen), u(gen)) + (i == j ? 4.0 : 0.0)});
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("spmv small cases") {
    const Vector x{1.0, 2.0, 3.0};
    CHECK(SparseMatrix::identity(3).apply(x) == x);
    CHECK(SparseMatrix(2, 2).apply(Vector{5.0, 7.0}) == Vector{0.0, 0.0});
    const Scalar a(1.5, -2.0), b(0.25, 3.0);
    CHECK(dense_to_sparse({{0.0, 1.0}, {1.0, 0.0}}).apply(Vector{a, b}) == Vector{b, a});
    CHECK_THROWS_AS(SparseMatrix::identity(3).apply(Vector{1.0, 2.0}), DimensionError);
  }

  TEST_CASE("factorize and solve hand cases") {
    CHECK(factorize(dense_to_sparse({{2.0}})).solve(Vector{4.0})[0] == Scalar(2.0));
    const Vector x = factorize(dense_to_sparse({{1.0, 0.0}, {0.0, kI}})).solve(Vector{1.0, 1.0});
    CHECK(std::abs(x[0] - 1.0) < 1e-15);
    CHECK(std::abs(x[1] + kI) < 1e-15);
    const Scalar d(1.0, 1.0);
    const Vector y = factorize(dense_to_sparse({{d, 0.0}, {0.0, d}})).solve(Vector{2.0, 2.0 * kI});
    CHECK(std::abs(y[0] - Scalar(1.0, -1.0)) < 1e-15);
    CHECK(std::abs(y[1] - Scalar(1.0, 1.0)) < 1e-15);
  }

  TEST_CASE("singular pivot is reported") {
    CHECK_THROWS_AS(factorize(dense_to_sparse({{1.0, 1.0}, {1.0, 1.0}})), SingularMatrixError);
  }

  TEST_CASE("band LU reconstructs the matrix and solves random systems") {
    const SparseMatrix a = random_sparse(40, 3, 0.1);
    const auto f = factorize(a);
    const DenseMatrix r = f.reconstruct();
    const DenseMatrix d = DenseMatrix::from_sparse(a);
    CHECK((r - d).max_abs() < 1e-12);
    const Vector b = random_complex(40, 5);
    CHECK(testing::rel_diff(a.apply(f.solve(b)), b) < 1e-12);
    CHECK(testing::rel_diff(a.transpose().apply(f.solve_transpose(b)), b) < 1e-12);
  }

  TEST_CASE("scalar and AVX2 kernels agree") {
    const auto* avx = kernels::avx2_table();
    if (avx == nullptr) return;
    const auto& ref = kernels::scalar_table();
    for (Index n : {0, 1, 2, 3, 7, 64, 1001}) {
      const Vector x = random_complex(n, 11 + n);
      const Vector y = random_complex(n, 12 + n);
      const double scale = std::max(1.0, norm2(x) * norm2(y));
      CHECK(std::abs(avx->dotu(x.data(), y.data(), n) - ref.dotu(x.data(), y.data(), n)) <= 1e-14 * scale);
      CHECK(std::abs(avx->dotc(x.data(), y.data(), n) - ref.dotc(x.data(), y.data(), n)) <= 1e-14 * scale);
      Vector y1 = y, y2 = y;
      const Scalar alpha(0.3, -1.7);
      avx->axpy(alpha, x.data(), y1.data(), n);
      ref.axpy(alpha, x.data(), y2.data(), n);
      CHECK(testing::rel_diff(y1, y2) <= 1e-15);
    }
    const SparseMatrix a = random_sparse(300, 9, 0.05);
    const Vector x = random_complex(300, 4);
    Vector y1(300), y2(300);
    avx->csr_spmv(300, a.row_ptr().data(), a.col_idx().data(), a.values().data(), x.data(), y1.data());
    ref.csr_spmv(300, a.row_ptr().data(), a.col_idx().data(), a.values().data(), x.data(), y2.data());
    CHECK(testing::rel_diff(y1, y2) <= 1e-14);
  }

  TEST_CASE("gmres small cases") {
    const auto ip = WeightedInnerProduct::euclidean(2);
    const Vector b{Scalar(1.0, 2.0), Scalar(-3.0, 0.5)};
    const auto r1 = gmres([](const Vector& v) { return v; }, b, ip, 1e-12, 10);
    CHECK(r1.converged);
    CHECK(r1.iterations == 1);
    CHECK(testing::rel_diff(r1.x, b) < 1e-14);
    const auto r2 = gmres([](const Vector& v) { return Vector{v[0], 2.0 * v[1]}; }, Vector{1.0, 1.0}, ip, 1e-12, 10);
    CHECK(r2.converged);
    CHECK(r2.iterations <= 2);
    CHECK(std::abs(r2.x[0] - 1.0) < 1e-12);
    CHECK(std::abs(r2.x[1] - 0.5) < 1e-12);
  }

  TEST_CASE("gmres in a weighted inner product solves a nonsymmetric system") {
    const SparseMatrix a = random_sparse(60, 21, 0.08);
    std::vector<Scalar> w(60);
    for (Index i = 0; i < 60; ++i) w[i] = 1.0 + 0.1 * static_cast<double>(i % 7);
    const WeightedInnerProduct ip(SparseMatrix::diagonal(w), WeightedInnerProduct::Mode::M_inverse);
    const Vector b = random_complex(60, 2);
    const auto r = gmres([&a](const Vector& v) { return a.apply(v); }, b, ip, 1e-12, 200);
    CHECK(r.converged);
    CHECK(testing::rel_diff(a.apply(r.x), b) < 1e-10);
    for (std::size_t k = 1; k < r.residuals.size(); ++k) CHECK(r.residuals[k] <= r.residuals[k - 1] * (1 + 1e-12));
  }

  TEST_CASE("weighted inner products") {
    std::vector<Scalar> w{2.0, 4.0};
    const SparseMatrix m = SparseMatrix::diagonal(w);
    const Vector x{1.0, kI};
    CHECK(std::abs(WeightedInnerProduct(m, WeightedInnerProduct::Mode::M).norm_squared(x) - 6.0) < 1e-15);
    CHECK(std::abs(WeightedInnerProduct(m, WeightedInnerProduct::Mode::M_inverse).norm_squared(x) - 0.75) < 1e-15);
  }

  TEST_CASE("matrix market round trip") {
    const SparseMatrix a = random_sparse(12, 8, 0.2);
    std::stringstream ss;
    write_matrix_market(ss, a);
    const SparseMatrix b = read_matrix_market(ss);
    CHECK((DenseMatrix::from_sparse(a) - DenseMatrix::from_sparse(b)).max_abs() == 0.0);
  }

  TEST_CASE("matrix market reads symmetric real storage") {
    std::stringstream ss("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 3\n2 1 -1\n");
    const SparseMatrix a = read_matrix_market(ss);
    CHECK(a.at(0, 1) == Scalar(-1.0));
    CHECK(a.at(1, 0) == Scalar(-1.0));
    CHECK(a.at(0, 0) == Scalar(3.0));
  }

  TEST_CASE("spectral helpers") {
    DenseMatrix a(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    CHECK(nullspace_dimension(a) == 1);
    const auto s = singular_values(a);
    CHECK(std::abs(s[0] - 2.0) < 1e-14);
    DenseMatrix spd(2, 2);
    spd(0, 0) = 4.0;
    spd(1, 1) = 9.0;
    const auto roots = spd_roots(spd);
    CHECK(std::abs(roots.sqrt(1, 1) - 3.0) < 1e-14);
    CHECK(std::abs(roots.inv_sqrt(0, 0) - 0.5) < 1e-14);
    DenseMatrix b(3, 1);
    b(0, 0) = 1.0;
    const DenseMatrix q = orthogonal_complement(b, 3);
    CHECK(q.cols() == 2);
    for (Index j = 0; j < 2; ++j) CHECK(std::abs(q(0, j)) < 1e-14);
  }
}
