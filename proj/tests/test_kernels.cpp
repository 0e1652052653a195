#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "speco/kernels.hpp"
#include "speco/rng.hpp"

using speco::Rng;
namespace kernels = speco::kernels;

namespace {

// Sizes straddling every SIMD-width boundary plus the scalar tail cases.
const std::vector<std::size_t> kSizes = {0, 1, 2,  3,  4,  5,  7,   8,    9,
                                         15, 16, 17, 31, 32, 33, 100, 1000, 1023};

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -3.0, double hi = 3.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

bool bytes_equal(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  if (a.empty()) return true;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar reference kernels compute the documented formulas") {
  const auto& k = kernels::scalar_ops();
  CHECK(std::string(k.name) == "scalar");

  const std::vector<double> x = {1.0, -2.0, 3.0};
  const std::vector<double> y = {0.5, 4.0, -1.0};

  CHECK(k.dot(x.data(), y.data(), 3) == doctest::Approx(1.0 * 0.5 - 2.0 * 4.0 - 3.0).epsilon(1e-15));
  CHECK(k.nrm2sq(x.data(), 3) == doctest::Approx(14.0).epsilon(1e-15));
  CHECK(k.diff_nrm2sq(x.data(), y.data(), 3) == doctest::Approx(0.25 + 36.0 + 16.0).epsilon(1e-15));
  CHECK(k.l1_norm(x.data(), 3) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(k.max_abs(x.data(), 3) == doctest::Approx(3.0).epsilon(1e-15));

  std::vector<double> out(3);
  k.scale(x.data(), 2.0, out.data(), 3);
  CHECK(out == std::vector<double>{2.0, -4.0, 6.0});

  out = y;
  k.axpy(3.0, x.data(), out.data(), 3);
  CHECK(out[0] == doctest::Approx(3.5));
  CHECK(out[1] == doctest::Approx(-2.0));
  CHECK(out[2] == doctest::Approx(8.0));

  k.axpby(2.0, x.data(), -1.0, y.data(), out.data(), 3);
  CHECK(out[0] == doctest::Approx(1.5));
  CHECK(out[1] == doctest::Approx(-8.0));
  CHECK(out[2] == doctest::Approx(7.0));

  k.ewise_mul(x.data(), y.data(), out.data(), 3);
  CHECK(out == std::vector<double>{0.5, -8.0, -3.0});

  k.ewise_div(x.data(), y.data(), out.data(), 3);
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(-0.5));
  CHECK(out[2] == doctest::Approx(-3.0));
}

TEST_CASE("soft threshold shrinks by the threshold and zeroes the rest") {
  const auto& k = kernels::scalar_ops();
  const std::vector<double> x = {2.5, -0.3, 0.0, -4.0, 1.0};
  std::vector<double> out(5);
  k.soft_threshold(x.data(), 1.0, out.data(), 5);
  CHECK(out[0] == doctest::Approx(1.5));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == doctest::Approx(-3.0));
  CHECK(out[4] == 0.0);

  k.soft_threshold(x.data(), 0.0, out.data(), 5);  // zero threshold is the identity
  CHECK(bytes_equal(out, x));
}

TEST_CASE("fused admm kernels match their definitions") {
  const auto& k = kernels::scalar_ops();
  const std::vector<double> g = {1.0, 2.0, -1.0};
  const std::vector<double> u = {0.5, -0.5, 0.25};
  const std::vector<double> s = {2.0, 0.0, 4.0};
  std::vector<double> out(3);

  k.combine_gus(g.data(), u.data(), s.data(), 0.5, out.data(), 3);
  CHECK(out[0] == doctest::Approx(1.0 - 0.5 + 1.0));
  CHECK(out[1] == doctest::Approx(2.0 + 0.5 + 0.0));
  CHECK(out[2] == doctest::Approx(-1.0 - 0.25 + 2.0));

  std::vector<double> acc = u;
  const std::vector<double> f = {3.0, 3.0, 3.0};
  k.accum_diff(f.data(), g.data(), acc.data(), 3);
  CHECK(acc[0] == doctest::Approx(0.5 + 2.0));
  CHECK(acc[1] == doctest::Approx(-0.5 + 1.0));
  CHECK(acc[2] == doctest::Approx(0.25 + 4.0));
}

TEST_CASE("runtime dispatch exposes a valid kernel table") {
  const auto& k = kernels::ops();
  const std::string name = k.name;
  CHECK((name == "scalar" || name == "avx2"));
  if (!kernels::cpu_has_avx2()) CHECK(name == "scalar");
  // Every slot must be populated regardless of the selected path.
  CHECK(k.dot != nullptr);
  CHECK(k.nrm2sq != nullptr);
  CHECK(k.diff_nrm2sq != nullptr);
  CHECK(k.l1_norm != nullptr);
  CHECK(k.max_abs != nullptr);
  CHECK(k.scale != nullptr);
  CHECK(k.axpy != nullptr);
  CHECK(k.axpby != nullptr);
  CHECK(k.ewise_mul != nullptr);
  CHECK(k.ewise_div != nullptr);
  CHECK(k.soft_threshold != nullptr);
  CHECK(k.combine_gus != nullptr);
  CHECK(k.accum_diff != nullptr);
}

TEST_CASE("simd elementwise kernels agree with scalar bit for bit") {
  if (!kernels::cpu_has_avx2()) return;
  const auto& ks = kernels::scalar_ops();
  const auto& kv = kernels::avx2_ops();
  CHECK(std::string(kv.name) == "avx2");

  Rng rng(7101);
  for (std::size_t n : kSizes) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n, 0.25, 3.0);  // positive so division stays tame
    std::vector<double> a(n), b(n);

    ks.scale(x.data(), 1.7, a.data(), n);
    kv.scale(x.data(), 1.7, b.data(), n);
    CHECK(bytes_equal(a, b));

    a = y;
    b = y;
    ks.axpy(-0.3, x.data(), a.data(), n);
    kv.axpy(-0.3, x.data(), b.data(), n);
    CHECK(bytes_equal(a, b));

    ks.axpby(0.9, x.data(), -1.1, y.data(), a.data(), n);
    kv.axpby(0.9, x.data(), -1.1, y.data(), b.data(), n);
    CHECK(bytes_equal(a, b));

    ks.ewise_mul(x.data(), y.data(), a.data(), n);
    kv.ewise_mul(x.data(), y.data(), b.data(), n);
    CHECK(bytes_equal(a, b));

    ks.ewise_div(x.data(), y.data(), a.data(), n);
    kv.ewise_div(x.data(), y.data(), b.data(), n);
    CHECK(bytes_equal(a, b));

    ks.soft_threshold(x.data(), 0.6, a.data(), n);
    kv.soft_threshold(x.data(), 0.6, b.data(), n);
    CHECK(bytes_equal(a, b));

    const auto s = random_vec(rng, n);
    ks.combine_gus(x.data(), y.data(), s.data(), 0.45, a.data(), n);
    kv.combine_gus(x.data(), y.data(), s.data(), 0.45, b.data(), n);
    CHECK(bytes_equal(a, b));

    a = s;
    b = s;
    ks.accum_diff(x.data(), y.data(), a.data(), n);
    kv.accum_diff(x.data(), y.data(), b.data(), n);
    CHECK(bytes_equal(a, b));
  }
}

TEST_CASE("simd reductions agree with scalar to tight relative tolerance") {
  if (!kernels::cpu_has_avx2()) return;
  const auto& ks = kernels::scalar_ops();
  const auto& kv = kernels::avx2_ops();

  Rng rng(7102);
  for (std::size_t n : kSizes) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    const auto rel = [](double a, double b) {
      const double scale = std::max({std::abs(a), std::abs(b), 1.0});
      return std::abs(a - b) / scale;
    };
    CHECK(rel(ks.dot(x.data(), y.data(), n), kv.dot(x.data(), y.data(), n)) < 1e-12);
    CHECK(rel(ks.nrm2sq(x.data(), n), kv.nrm2sq(x.data(), n)) < 1e-12);
    CHECK(rel(ks.diff_nrm2sq(x.data(), y.data(), n), kv.diff_nrm2sq(x.data(), y.data(), n)) <
          1e-12);
    CHECK(rel(ks.l1_norm(x.data(), n), kv.l1_norm(x.data(), n)) < 1e-12);
    // max_abs has a unique exact answer on both paths.
    CHECK(ks.max_abs(x.data(), n) == kv.max_abs(x.data(), n));
  }
}
