#pragma once

#include <cstddef>

// Fused elementwise and reduction primitives shared by the solvers. The
// scalar implementations define the reference semantics; an AVX2+FMA variant
// of the whole table is selected at runtime when the CPU supports it.
// Elementwise kernels agree bit-for-bit with the scalar reference (both
// paths use fused multiply-add); reductions may differ in accumulation
// order and are equivalence-tested against tight relative tolerances.
namespace speco::kernels {

struct Ops {
  const char* name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*nrm2sq)(const double* x, std::size_t n);
  double (*diff_nrm2sq)(const double* x, const double* y, std::size_t n);
  double (*l1_norm)(const double* x, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // out = a * x
  void (*scale)(const double* x, double a, double* out, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = a * x + b * y
  void (*axpby)(double a, const double* x, double b, const double* y, double* out, std::size_t n);
  void (*ewise_mul)(const double* x, const double* y, double* out, std::size_t n);
  void (*ewise_div)(const double* x, const double* y, double* out, std::size_t n);
  // out = sign(x) * max(|x| - k, 0)
  void (*soft_threshold)(const double* x, double k, double* out, std::size_t n);
  // out = g - u + c * s   (the ADMM projection-step argument)
  void (*combine_gus)(const double* g, const double* u, const double* s, double c, double* out, std::size_t n);
  // u += f - g            (the ADMM dual update)
  void (*accum_diff)(const double* f, const double* g, double* u, std::size_t n);
};

const Ops& scalar_ops();
const Ops& avx2_ops();  // valid to call only when cpu_has_avx2()
bool cpu_has_avx2();
// Runtime-selected table; set SPECO_FORCE_SCALAR=1 to pin the scalar path.
const Ops& ops();

}  // namespace speco::kernels
