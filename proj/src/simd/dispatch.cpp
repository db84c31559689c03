#include <cstdlib>
#include <string_view>

#include "omaxcones/simd/kernels.hpp"

namespace omaxcones::simd {

#if defined(OMAXCONES_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(OMAXCONES_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable* const chosen = [] {
    const char* env = std::getenv("OMAXCONES_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return t;
    return &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace omaxcones::simd
