#pragma once

#include <schwarzlab/linalg/types.hpp>

#include <string_view>

// Inner loops shared by the sparse, dense and Krylov code. Each kernel has a
// scalar reference version and, where the CPU supports it, an AVX2 version.
// The active table is picked once at first use; SCHWARZLAB_KERNELS=scalar
// forces the reference path.
namespace schwarzlab::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // sum x_k y_k
  Scalar (*dotu)(const Scalar* x, const Scalar* y, Index n);
  // sum conj(x_k) y_k
  Scalar (*dotc)(const Scalar* x, const Scalar* y, Index n);
  // y += a x
  void (*axpy)(Scalar a, const Scalar* x, Scalar* y, Index n);
  // y = A x for CSR (row_ptr, col, val)
  void (*csr_spmv)(Index rows, const Index* row_ptr, const Index* col, const Scalar* val,
                   const Scalar* x, Scalar* y);
};

const KernelTable& scalar_table();
// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_table();

const KernelTable& active();
void select(Isa isa);
bool cpu_supports_avx2();
std::string_view isa_name(Isa isa);

inline Scalar dotu(const Scalar* x, const Scalar* y, Index n) { return active().dotu(x, y, n); }
inline Scalar dotc(const Scalar* x, const Scalar* y, Index n) { return active().dotc(x, y, n); }
inline void axpy(Scalar a, const Scalar* x, Scalar* y, Index n) { active().axpy(a, x, y, n); }

namespace detail {
const KernelTable* avx2_table_impl();
}

}  // namespace schwarzlab::kernels
