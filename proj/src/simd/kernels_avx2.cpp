#include "omaxcones/simd/kernels.hpp"

#include <immintrin.h>

namespace omaxcones::simd {

// Defined in dispatch.cpp; looked up only after the CPU check passed.
const KernelTable& avx2_kernel_table();

namespace {

// Complex arrays are interleaved (re, im); one __m256d holds two elements.

void caxpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0b0101);
    const __m256d t = _mm256_mul_pd(ai, xs);
    const __m256d prod = _mm256_fmaddsub_pd(ar, xv, t);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), prod));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cplx(y[i].real() + alpha.real() * xr - alpha.imag() * xi,
                y[i].imag() + alpha.real() * xi + alpha.imag() * xr);
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Returns the lane sums (even lanes, odd lanes) of v.
inline void hsum_pairs(__m256d v, double& even, double& odd) {
  alignas(32) double buf[4];
  _mm256_store_pd(buf, v);
  even = buf[0] + buf[2];
  odd = buf[1] + buf[3];
}

cplx cdotc_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  __m256d direct = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(ap + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
    direct = _mm256_fmadd_pd(av, bv, direct);
    cross = _mm256_fmadd_pd(av, _mm256_permute_pd(bv, 0b0101), cross);
  }
  double re = hsum(direct);
  double ce = 0.0, co = 0.0;
  hsum_pairs(cross, ce, co);
  double im = ce - co;
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

cplx cdotu_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  __m256d direct = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(ap + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
    direct = _mm256_fmadd_pd(av, bv, direct);
    cross = _mm256_fmadd_pd(av, _mm256_permute_pd(bv, 0b0101), cross);
  }
  double de = 0.0, dodd = 0.0, ce = 0.0, co = 0.0;
  hsum_pairs(direct, de, dodd);
  hsum_pairs(cross, ce, co);
  double re = de - dodd;
  double im = ce + co;
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
  }
  return {re, im};
}

void rotate_avx2(double* x, double* y, std::size_t n, double c, double s) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(cv, xv, _mm256_mul_pd(sv, yv)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(sv, xv, _mm256_mul_pd(cv, yv)));
  }
  for (; i < n; ++i) {
    const double xi = x[i], yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", caxpy_avx2, cdotc_avx2, cdotu_avx2, rotate_avx2};
  return table;
}

}  // namespace omaxcones::simd
