#include <cstdlib>
#include <string>

#include "bbm/simd/kernels.hpp"

namespace bbm::simd {

#ifdef BBM_HAVE_AVX2
const Kernels& avx2_kernels();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(BBM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels& resolve() {
  if (const char* forced = std::getenv("BBM_SIMD"); forced != nullptr && std::string(forced) == "scalar") {
    return scalar_kernels();
  }
  if (const Kernels* k = kernels_for(Isa::avx2)) return *k;
  return scalar_kernels();
}

}  // namespace

const Kernels* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
#ifdef BBM_HAVE_AVX2
      if (cpu_has_avx2()) return &avx2_kernels();
#endif
      return nullptr;
  }
  return nullptr;
}

const Kernels& active() {
  static const Kernels& table = resolve();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace bbm::simd
