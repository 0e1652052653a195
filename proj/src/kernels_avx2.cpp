// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma on x86-64 and only
// reached through the runtime dispatcher, so the host process never executes
// these instructions on unsupported CPUs. Remainder elements fall back to the
// scalar expressions of the reference kernels.
#include "speco/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace speco::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, swapped));
}

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

double k_dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s = std::fma(x[i], y[i], s);
  return s;
}

double k_nrm2sq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s = std::fma(x[i], x[i], s);
  return s;
}

double k_diff_nrm2sq(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s = std::fma(d, d, s);
  }
  return s;
}

double k_l1_norm(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(x + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double k_max_abs(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(x + i)));
  double m = hmax(acc);
  for (; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

void k_scale(const double* x, double a, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = a * x[i];
}

void k_axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void k_axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), by));
  }
  for (; i < n; ++i) out[i] = std::fma(a, x[i], b * y[i]);
}

void k_ewise_mul(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void k_ewise_div(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] / y[i];
}

void k_soft_threshold(const double* x, double k, double* out, std::size_t n) {
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d signbit = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000LL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d t = _mm256_sub_pd(abs_pd(v), vk);
    const __m256d keep = _mm256_cmp_pd(t, zero, _CMP_GT_OQ);
    const __m256d shrunk = _mm256_or_pd(t, _mm256_and_pd(v, signbit));
    _mm256_storeu_pd(out + i, _mm256_and_pd(keep, shrunk));
  }
  for (; i < n; ++i) {
    const double t = std::fabs(x[i]) - k;
    out[i] = t > 0.0 ? std::copysign(t, x[i]) : 0.0;
  }
}

void k_combine_gus(const double* g, const double* u, const double* s, double c, double* out,
                   std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gu = _mm256_sub_pd(_mm256_loadu_pd(g + i), _mm256_loadu_pd(u + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vc, _mm256_loadu_pd(s + i), gu));
  }
  for (; i < n; ++i) out[i] = std::fma(c, s[i], g[i] - u[i]);
}

void k_accum_diff(const double* f, const double* g, double* u, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(f + i), _mm256_loadu_pd(g + i));
    _mm256_storeu_pd(u + i, _mm256_add_pd(_mm256_loadu_pd(u + i), d));
  }
  for (; i < n; ++i) u[i] = u[i] + (f[i] - g[i]);
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table = {
      "avx2",       k_dot,       k_nrm2sq,    k_diff_nrm2sq,    k_l1_norm,
      k_max_abs,    k_scale,     k_axpy,      k_axpby,          k_ewise_mul,
      k_ewise_div,  k_soft_threshold,         k_combine_gus,    k_accum_diff,
  };
  return table;
}

}  // namespace speco::kernels

#else

namespace speco::kernels {

// Non-x86 build: the dispatcher never selects this table; alias the scalar
// reference so the symbol still exists.
const Ops& avx2_ops() { return scalar_ops(); }

}  // namespace speco::kernels

#endif
