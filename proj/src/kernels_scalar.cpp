// Reference kernels. Every multiply-add chain goes through std::fma so the
// AVX2 variants (which use vfmadd) can match these results exactly on the
// elementwise operations.
#include <cmath>

#include "speco/kernels.hpp"

namespace speco::kernels {
namespace {

double k_dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc = std::fma(x[i], y[i], acc);
  return acc;
}

double k_nrm2sq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc = std::fma(x[i], x[i], acc);
  return acc;
}

double k_diff_nrm2sq(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc = std::fma(d, d, acc);
  }
  return acc;
}

double k_l1_norm(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

double k_max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

void k_scale(const double* x, double a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void k_axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void k_axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(a, x[i], b * y[i]);
}

void k_ewise_mul(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void k_ewise_div(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] / y[i];
}

void k_soft_threshold(const double* x, double k, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::fabs(x[i]) - k;
    out[i] = t > 0.0 ? std::copysign(t, x[i]) : 0.0;
  }
}

void k_combine_gus(const double* g, const double* u, const double* s, double c, double* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(c, s[i], g[i] - u[i]);
}

void k_accum_diff(const double* f, const double* g, double* u, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) u[i] = u[i] + (f[i] - g[i]);
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      "scalar",     k_dot,       k_nrm2sq,    k_diff_nrm2sq,    k_l1_norm,
      k_max_abs,    k_scale,     k_axpy,      k_axpby,          k_ewise_mul,
      k_ewise_div,  k_soft_threshold,         k_combine_gus,    k_accum_diff,
  };
  return table;
}

}  // namespace speco::kernels
