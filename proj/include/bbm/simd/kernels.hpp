#pragma once

// Data-parallel inner loops shared by the spectral modules.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is picked once at first use from the CPU
// feature bits; setting BBM_SIMD=scalar in the environment forces the
// reference path. Complex arrays are passed as interleaved (re, im) doubles
// and `n` always counts complex entries for complex kernels.

#include <cstddef>
#include <string_view>

namespace bbm::simd {

enum class Isa { scalar, avx2 };

struct Kernels {
  Isa isa;

  // out[i] = a[i] * b[i] over n complex entries. out may alias a or b.
  void (*complex_mul)(const double* a, const double* b, double* out, std::size_t n);

  // out[i] = a[i] * b[i] over n reals. out may alias a or b.
  void (*real_mul)(const double* a, const double* b, double* out, std::size_t n);

  // y[i] += alpha * x[i] over n reals.
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // sum_i w[i] * |z[i]|^2 with z complex (n entries) and w real (n entries).
  double (*weighted_norm2)(const double* w, const double* z, std::size_t n);

  // false if any of the n reals is NaN or infinite.
  bool (*all_finite)(const double* x, std::size_t n);
};

const Kernels& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const Kernels* kernels_for(Isa isa);

// Dispatched table; resolved once, thread-safe.
const Kernels& active();

std::string_view isa_name(Isa isa);

}  // namespace bbm::simd
