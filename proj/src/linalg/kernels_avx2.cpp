#include <schwarzlab/linalg/kernels.hpp>

#include <immintrin.h>

// Two complex doubles per 256-bit register, interleaved (re, im, re, im).
namespace schwarzlab::kernels {

namespace {

inline const double* as_doubles(const Scalar* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(Scalar* p) { return reinterpret_cast<double*>(p); }

// acc1 collects (xr*yr, xi*yr), acc2 collects (xi*yi, xr*yi).
inline void mul_accumulate(__m256d x, __m256d y, __m256d& acc1, __m256d& acc2) {
  const __m256d yr = _mm256_movedup_pd(y);
  const __m256d yi = _mm256_permute_pd(y, 0xF);
  const __m256d xs = _mm256_permute_pd(x, 0x5);
  acc1 = _mm256_fmadd_pd(x, yr, acc1);
  acc2 = _mm256_fmadd_pd(xs, yi, acc2);
}

inline void reduce(__m256d acc1, __m256d acc2, double a1[2], double a2[2]) {
  const __m128d s1 = _mm_add_pd(_mm256_castpd256_pd128(acc1), _mm256_extractf128_pd(acc1, 1));
  const __m128d s2 = _mm_add_pd(_mm256_castpd256_pd128(acc2), _mm256_extractf128_pd(acc2, 1));
  _mm_storeu_pd(a1, s1);
  _mm_storeu_pd(a2, s2);
}

Scalar dotu_avx2(const Scalar* x, const Scalar* y, Index n) {
  __m256d acc1 = _mm256_setzero_pd(), acc2 = _mm256_setzero_pd();
  const double* xd = as_doubles(x);
  const double* yd = as_doubles(y);
  Index k = 0;
  for (; k + 2 <= n; k += 2) {
    mul_accumulate(_mm256_loadu_pd(xd + 2 * k), _mm256_loadu_pd(yd + 2 * k), acc1, acc2);
  }
  double a1[2], a2[2];
  reduce(acc1, acc2, a1, a2);
  double re = a1[0] - a2[0];
  double im = a1[1] + a2[1];
  for (; k < n; ++k) {
    re += x[k].real() * y[k].real() - x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() + x[k].imag() * y[k].real();
  }
  return {re, im};
}

Scalar dotc_avx2(const Scalar* x, const Scalar* y, Index n) {
  __m256d acc1 = _mm256_setzero_pd(), acc2 = _mm256_setzero_pd();
  const double* xd = as_doubles(x);
  const double* yd = as_doubles(y);
  Index k = 0;
  for (; k + 2 <= n; k += 2) {
    mul_accumulate(_mm256_loadu_pd(xd + 2 * k), _mm256_loadu_pd(yd + 2 * k), acc1, acc2);
  }
  double a1[2], a2[2];
  reduce(acc1, acc2, a1, a2);
  double re = a1[0] + a2[0];
  double im = a2[1] - a1[1];
  for (; k < n; ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {re, im};
}

void axpy_avx2(Scalar a, const Scalar* x, Scalar* y, Index n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const double* xd = as_doubles(x);
  double* yd = as_doubles(y);
  Index k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * k);
    const __m256d xs = _mm256_permute_pd(xv, 0x5);
    const __m256d prod = _mm256_fmaddsub_pd(xv, ar, _mm256_mul_pd(xs, ai));
    _mm256_storeu_pd(yd + 2 * k, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * k), prod));
  }
  for (; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    y[k] = Scalar(y[k].real() + a.real() * xr - a.imag() * xi,
                  y[k].imag() + a.real() * xi + a.imag() * xr);
  }
}

void csr_spmv_avx2(Index rows, const Index* row_ptr, const Index* col, const Scalar* val,
                   const Scalar* x, Scalar* y) {
  const double* vd = as_doubles(val);
  const double* xd = as_doubles(x);
  for (Index r = 0; r < rows; ++r) {
    __m256d acc1 = _mm256_setzero_pd(), acc2 = _mm256_setzero_pd();
    Index k = row_ptr[r];
    const Index end = row_ptr[r + 1];
    for (; k + 2 <= end; k += 2) {
      const __m256d xv = _mm256_set_m128d(_mm_loadu_pd(xd + 2 * col[k + 1]), _mm_loadu_pd(xd + 2 * col[k]));
      mul_accumulate(_mm256_loadu_pd(vd + 2 * k), xv, acc1, acc2);
    }
    double a1[2], a2[2];
    reduce(acc1, acc2, a1, a2);
    double re = a1[0] - a2[0];
    double im = a1[1] + a2[1];
    for (; k < end; ++k) {
      const Scalar& v = val[k];
      const Scalar& xv = x[col[k]];
      re += v.real() * xv.real() - v.imag() * xv.imag();
      im += v.real() * xv.imag() + v.imag() * xv.real();
    }
    y[r] = {re, im};
  }
}

const KernelTable kAvx2{Isa::avx2, dotu_avx2, dotc_avx2, axpy_avx2, csr_spmv_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table_impl() { return &kAvx2; }
}  // namespace detail

}  // namespace schwarzlab::kernels
