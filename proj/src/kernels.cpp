#include "kgstress/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace kgstress::kernels {
namespace {

const Backend& select_backend() {
  const char* forced = std::getenv("KGSTRESS_KERNELS");
  if (forced != nullptr) {
    if (std::strcmp(forced, "scalar") == 0) return scalar_backend();
#if KGSTRESS_HAVE_AVX2
    if (std::strcmp(forced, "avx2") == 0) return avx2_backend();
#endif
  }
#if KGSTRESS_HAVE_AVX2
#if defined(__GNUC__) || defined(__clang__)
  if (__builtin_cpu_supports("avx2")) return avx2_backend();
#endif
#endif
  return scalar_backend();
}

}  // namespace

const Backend& active_backend() {
  static const Backend& chosen = select_backend();
  return chosen;
}

}  // namespace kgstress::kernels
