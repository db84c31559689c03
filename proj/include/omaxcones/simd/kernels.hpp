#pragma once
// Data-parallel inner loops used by the dense complex kernel.
//
// Every routine exists as a scalar reference implementation and, where the
// target supports it, an AVX2/FMA variant. The active table is chosen once at
// first use from the CPU feature bits; OMAXCONES_SIMD=scalar forces the
// reference path.

#include <complex>
#include <cstddef>

namespace omaxcones::simd {

using cplx = std::complex<double>;

struct KernelTable {
  const char* name;
  // y[i] += alpha * x[i]
  void (*caxpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  // sum_i conj(a[i]) * b[i]
  cplx (*cdotc)(const cplx* a, const cplx* b, std::size_t n);
  // sum_i a[i] * b[i] (no conjugation)
  cplx (*cdotu)(const cplx* a, const cplx* b, std::size_t n);
  // (x, y) <- (c x - s y, s x + c y)
  void (*rotate)(double* x, double* y, std::size_t n, double c, double s);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the features.
const KernelTable* avx2_kernels();

const KernelTable& active_kernels();

}  // namespace omaxcones::simd
