#include <cstdlib>
#include <string_view>

#include "riccap/kernels.hpp"

namespace riccap::kernels {

#if RICCAP_BUILD_AVX2
const KernelTable* avx2_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if RICCAP_BUILD_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* table_by_name(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("RICCATI_CAPACITY_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace riccap::kernels
