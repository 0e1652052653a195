#include "speco/kernels.hpp"

#include <cstdlib>

namespace speco::kernels {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& ops() {
  static const Ops& selected = []() -> const Ops& {
    if (const char* force = std::getenv("SPECO_FORCE_SCALAR"); force && force[0] == '1')
      return scalar_ops();
    return cpu_has_avx2() ? avx2_ops() : scalar_ops();
  }();
  return selected;
}

}  // namespace speco::kernels
