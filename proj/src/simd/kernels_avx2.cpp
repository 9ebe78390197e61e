// Compiled with -mavx2 -mfma; only reached through kernels_for(Isa::avx2)
// after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "bbm/simd/kernels.hpp"

namespace bbm::simd {
namespace {

// Two complex numbers per register: [r0 i0 r1 i1].
inline __m256d cmul2(__m256d a, __m256d b) {
  const __m256d ar = _mm256_movedup_pd(a);
  const __m256d ai = _mm256_permute_pd(a, 0xF);
  const __m256d bswap = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bswap));
}

void complex_mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = _mm256_loadu_pd(a + 2 * i);
    const __m256d a1 = _mm256_loadu_pd(a + 2 * i + 4);
    const __m256d b0 = _mm256_loadu_pd(b + 2 * i);
    const __m256d b1 = _mm256_loadu_pd(b + 2 * i + 4);
    _mm256_storeu_pd(out + 2 * i, cmul2(a0, b0));
    _mm256_storeu_pd(out + 2 * i + 4, cmul2(a1, b1));
  }
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(out + 2 * i, cmul2(_mm256_loadu_pd(a + 2 * i), _mm256_loadu_pd(b + 2 * i)));
  }
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = ar * br - ai * bi;
    out[2 * i + 1] = ar * bi + ai * br;
  }
}

void real_mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    _mm256_storeu_pd(out + i, p0);
    _mm256_storeu_pd(out + i + 4, p1);
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    const __m256d y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

double weighted_norm2(const double* w, const double* z, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // [w0 w0 w1 w1] and [w2 w2 w3 w3]
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d w01 = _mm256_permute4x64_pd(wv, 0x50);
    const __m256d w23 = _mm256_permute4x64_pd(wv, 0xFA);
    const __m256d z0 = _mm256_loadu_pd(z + 2 * i);
    const __m256d z1 = _mm256_loadu_pd(z + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(w01, _mm256_mul_pd(z0, z0), acc0);
    acc1 = _mm256_fmadd_pd(w23, _mm256_mul_pd(z1, z1), acc1);
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  double total = _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
  for (; i < n; ++i) {
    total += w[i] * (z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1]);
  }
  return total;
}

bool all_finite(const double* x, std::size_t n) {
  // x - x is 0 for finite x and NaN otherwise.
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(_mm256_sub_pd(v, v), _mm256_setzero_pd(), _CMP_NEQ_UQ));
  }
  if (_mm256_movemask_pd(bad) != 0) return false;
  for (; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels table{Isa::avx2, complex_mul, real_mul, axpy, weighted_norm2, all_finite};
  return table;
}

}  // namespace bbm::simd
