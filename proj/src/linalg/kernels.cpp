#include <schwarzlab/linalg/kernels.hpp>

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace schwarzlab::kernels {

namespace {

// Written out in real arithmetic: std::complex operator* goes through the
// C99 Annex G NaN handling, which is much slower and not what we want here.
Scalar dotu_scalar(const Scalar* x, const Scalar* y, Index n) {
  double re = 0.0, im = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    const double yr = y[k].real(), yi = y[k].imag();
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

Scalar dotc_scalar(const Scalar* x, const Scalar* y, Index n) {
  double re = 0.0, im = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    const double yr = y[k].real(), yi = y[k].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void axpy_scalar(Scalar a, const Scalar* x, Scalar* y, Index n) {
  const double ar = a.real(), ai = a.imag();
  for (Index k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    y[k] = Scalar(y[k].real() + ar * xr - ai * xi, y[k].imag() + ar * xi + ai * xr);
  }
}

void csr_spmv_scalar(Index rows, const Index* row_ptr, const Index* col, const Scalar* val,
                     const Scalar* x, Scalar* y) {
  for (Index r = 0; r < rows; ++r) {
    double re = 0.0, im = 0.0;
    for (Index k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const double vr = val[k].real(), vi = val[k].imag();
      const Scalar& xv = x[col[k]];
      re += vr * xv.real() - vi * xv.imag();
      im += vr * xv.imag() + vi * xv.real();
    }
    y[r] = {re, im};
  }
}

const KernelTable kScalar{Isa::scalar, dotu_scalar, dotc_scalar, axpy_scalar, csr_spmv_scalar};

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* pick_default() {
  const char* env = std::getenv("SCHWARZLAB_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalar;
  if (const KernelTable* t = avx2_table()) return t;
  return &kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

bool cpu_supports_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* avx2_table() {
#if defined(SCHWARZLAB_HAVE_AVX2)
  if (cpu_supports_avx2()) return detail::avx2_table_impl();
#endif
  return nullptr;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = pick_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void select(Isa isa) {
  if (isa == Isa::avx2) {
    const KernelTable* t = avx2_table();
    if (t == nullptr) throw Error("AVX2 kernels are not available on this machine");
    g_active.store(t, std::memory_order_release);
  } else {
    g_active.store(&kScalar, std::memory_order_release);
  }
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

#if !defined(SCHWARZLAB_HAVE_AVX2)
namespace detail {
const KernelTable* avx2_table_impl() { return nullptr; }
}  // namespace detail
#endif

}  // namespace schwarzlab::kernels
