#include "bbm/simd/kernels.hpp"

#include <cmath>

namespace bbm::simd {
namespace {

void complex_mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = ar * br - ai * bi;
    out[2 * i + 1] = ar * bi + ai * br;
  }
}

void real_mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double weighted_norm2(const double* w, const double* z, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += w[i] * (z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1]);
  }
  return acc;
}

bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{Isa::scalar, complex_mul, real_mul, axpy, weighted_norm2, all_finite};
  return table;
}

}  // namespace bbm::simd
