#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "speco/correction.hpp"
#include "speco/linalg.hpp"
#include "speco/rng.hpp"
#include "speco/simulate.hpp"

using speco::CorrectionKind;
using speco::Dataset;
using speco::EstimatorKind;
using speco::Mat;
using speco::NoiseFamily;
using speco::NoiseSpec;
using speco::ResultRow;
using speco::Scenario;
using speco::ScenarioConfig;
using speco::SweepCell;
using speco::SweepPlan;
using speco::Vec;

namespace {

ScenarioConfig uniform_config(std::size_t n, std::size_t p, double omega, double delta) {
  ScenarioConfig c;
  c.scenario = Scenario::uniform_missing;
  c.n = n;
  c.model = speco::make_spiked_model(p, omega);
  c.delta = delta;
  return c;
}

}  // namespace

TEST_CASE("spiked model has the advertised leading eigenpair") {
  const speco::SpikedModel m = speco::make_spiked_model(10, 1.4);
  CHECK(m.beta0.size() == 10);
  for (std::size_t j = 0; j < 10; ++j) CHECK(m.beta0[j] == (j < 4 ? 1.0 : 0.0));

  const speco::linalg::SymEig eig = speco::linalg::eig_sym(m.sigma0);
  CHECK(eig.values.back() == doctest::Approx(1.4 * 4.0 + 1.0).epsilon(1e-10));
  CHECK(speco::max_abs_asymmetry(m.sigma0) == 0.0);

  const speco::SpikedModel tiny = speco::make_spiked_model(3, 0.5, Vec{0, 1, 0});
  CHECK(tiny.sigma0(1, 1) == doctest::Approx(1.5));
  CHECK(tiny.sigma0(0, 0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(speco::make_spiked_model(5, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(speco::make_spiked_model(5, 1.0, Vec{1, 1}), std::invalid_argument);
}

TEST_CASE("estimation error metric identities") {
  // The scale must be exactly representable (a signed power of two) for the
  // scaled copy to be collinear as stored; then the metric is zero to the bit.
  const Vec a = {1.0, 2.0, -1.0};
  Vec scaled = a;
  for (double& x : scaled) x *= -4.0;
  CHECK(speco::estimation_error(scaled, a) == 0.0);

  CHECK(speco::estimation_error(Vec{1, 0}, Vec{0, 1}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // 45 degrees: sqrt(2 - 2 cos^2) = 1.
  CHECK(speco::estimation_error(Vec{1, 0}, Vec{1, 1}) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(speco::estimation_error(Vec{0, 0}, a), std::invalid_argument);
  CHECK_THROWS_AS(speco::estimation_error(a, Vec{0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(speco::estimation_error(Vec{1, 0}, a), std::invalid_argument);
}

TEST_CASE("closed-form error equals the direct projector difference") {
  speco::Rng rng(601);
  for (int trial = 0; trial < 25; ++trial) {
    Vec a(6), b(6);
    for (double& x : a) x = rng.normal();
    for (double& x : b) x = rng.normal();
    const double na = speco::l2_norm(a);
    const double nb = speco::l2_norm(b);
    Mat pa = speco::outer(a);
    Mat pb = speco::outer(b);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      pa.data()[i] /= na * na;
      pb.data()[i] /= nb * nb;
      pa.data()[i] -= pb.data()[i];
    }
    CHECK(std::abs(speco::estimation_error(a, b) - speco::linalg::fro_norm(pa)) < 1e-10);
  }
}

TEST_CASE("analytic second-moment matrix for supported noise families") {
  NoiseSpec bern;
  bern.family = NoiseFamily::bernoulli;
  bern.delta = 0.5;
  const Mat mb = speco::analytic_m(bern, 2);
  CHECK(mb(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mb(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mb(0, 1) == doctest::Approx(0.25).epsilon(1e-15));

  NoiseSpec degenerate;
  degenerate.family = NoiseFamily::uniform;
  degenerate.lo = 1.0;
  degenerate.hi = 1.0;
  const Mat mu = speco::analytic_m(degenerate, 3);
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(mu.data()[i] == 1.0);

  NoiseSpec uni;
  uni.family = NoiseFamily::uniform;
  uni.lo = 0.5;
  uni.hi = 1.5;
  const Mat mw = speco::analytic_m(uni, 2);
  CHECK(mw(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mw(0, 0) == doctest::Approx(13.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("generation is deterministic per config and seed") {
  const ScenarioConfig c = uniform_config(40, 12, 1.0, 0.7);
  const Dataset d1 = speco::generate(c, 777);
  const Dataset d2 = speco::generate(c, 777);
  CHECK(std::memcmp(d1.data.values.data(), d2.data.values.data(),
                    d1.data.values.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(d1.mask.data(), d2.mask.data(), d1.mask.size() * sizeof(double)) == 0);

  const Dataset d3 = speco::generate(c, 778);
  CHECK(std::memcmp(d1.data.values.data(), d3.data.values.data(),
                    d1.data.values.size() * sizeof(double)) != 0);
}

TEST_CASE("full observation keeps every entry and degenerates the correction") {
  const ScenarioConfig c = uniform_config(30, 8, 1.0, 1.0);
  const Dataset d = speco::generate(c, 11);
  CHECK(d.observed_fraction == 1.0);
  for (std::size_t i = 0; i < d.mask.size(); ++i) CHECK(d.mask.data()[i] == 1.0);

  const speco::CorrectedCovariance corrected = speco::correct_uniform_missing(d.data, 1.0);
  const speco::CorrectedCovariance plain = speco::uncorrected_covariance(d.data);
  double worst = 0.0;
  for (std::size_t i = 0; i < corrected.matrix.size(); ++i)
    worst = std::max(worst,
                     std::abs(corrected.matrix.data()[i] - plain.matrix.data()[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("mask density concentrates at the observation probability") {
  ScenarioConfig c = uniform_config(200, 200, 1.0, 0.55);
  const Dataset d = speco::generate(c, 99);
  CHECK(std::abs(d.observed_fraction - 0.55) < 0.01);

  // Masked entries are exact zeros.
  for (std::size_t i = 0; i < d.mask.size(); ++i)
    if (d.mask.data()[i] == 0.0) CHECK(d.data.values.data()[i] == 0.0);
}

TEST_CASE("every scenario generates finite data with its matching correction") {
  std::vector<ScenarioConfig> configs;

  configs.push_back(uniform_config(25, 6, 1.0, 0.8));

  ScenarioConfig mult = uniform_config(25, 6, 1.0, 1.0);
  mult.scenario = Scenario::multiplicative;
  mult.noise.family = NoiseFamily::uniform;
  mult.noise.lo = 0.5;
  mult.noise.hi = 1.5;
  configs.push_back(mult);

  ScenarioConfig nonu = uniform_config(25, 6, 1.0, 1.0);
  nonu.scenario = Scenario::nonuniform_missing;
  nonu.delta_vec = Vec{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  configs.push_back(nonu);

  ScenarioConfig low = uniform_config(25, 6, 0.0, 0.9);
  low.scenario = Scenario::lowrank_additive_missing;
  low.d1 = 2.0;
  low.sigma_noise = 0.5;
  configs.push_back(low);

  for (const ScenarioConfig& c : configs) {
    const Dataset d = speco::generate(c, 42);
    CHECK(speco::all_finite(d.data.values));
    CHECK(d.ground_truth.size() == 6);
    CHECK(speco::l2_norm(d.ground_truth) > 0.0);

    const speco::CorrectionSpec spec = speco::matching_correction(c);
    const speco::CorrectedCovariance cc = speco::apply_correction(d.data, spec);
    CHECK(speco::all_finite(cc.matrix));
    CHECK(speco::max_abs_asymmetry(cc.matrix) == 0.0);
  }

  // The low-rank design's truth is the unit spike direction.
  const Dataset low_d = speco::generate(configs.back(), 7);
  CHECK(speco::l2_norm(low_d.ground_truth) == doctest::Approx(1.0).epsilon(1e-12));
  const speco::CorrectionSpec low_spec = speco::matching_correction(configs.back());
  CHECK(low_spec.variant == CorrectionKind::lowrank);
  CHECK(low_spec.scale == speco::GramScale::raw_gram);
}

TEST_CASE("scenario validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(speco::validate_scenario(uniform_config(20, 6, 1.0, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(speco::validate_scenario(uniform_config(20, 6, 1.0, 1.0001)),
                  std::invalid_argument);
  CHECK_THROWS_AS(speco::validate_scenario(uniform_config(0, 6, 1.0, 0.5)),
                  std::invalid_argument);

  ScenarioConfig bad_noise = uniform_config(20, 6, 1.0, 1.0);
  bad_noise.scenario = Scenario::multiplicative;
  bad_noise.noise.family = NoiseFamily::uniform;
  bad_noise.noise.lo = 2.0;
  bad_noise.noise.hi = 1.0;
  CHECK_THROWS_AS(speco::validate_scenario(bad_noise), std::invalid_argument);

  ScenarioConfig bad_vec = uniform_config(20, 6, 1.0, 1.0);
  bad_vec.scenario = Scenario::nonuniform_missing;
  bad_vec.delta_vec = Vec{0.5, 0.5};  // wrong length
  CHECK_THROWS_AS(speco::validate_scenario(bad_vec), std::invalid_argument);
}

TEST_CASE("estimator names round-trip") {
  for (EstimatorKind k : {EstimatorKind::pca_oracle_data, EstimatorKind::sdp_corrected,
                          EstimatorKind::sdp_uncorrected, EstimatorKind::refined})
    CHECK(speco::estimator_from_string(speco::to_string(k)) == k);
  CHECK_THROWS_AS(speco::estimator_from_string("nope"), std::invalid_argument);
}

TEST_CASE("sweep emits one row per cell, replication, and estimator in canonical order") {
  SweepPlan plan;
  plan.cells.push_back(SweepCell{uniform_config(40, 8, 1.0, 0.8), "0.8"});
  plan.cells.push_back(SweepCell{uniform_config(40, 8, 2.0, 0.8), "0.8"});
  plan.estimators = {EstimatorKind::pca_oracle_data, EstimatorKind::sdp_corrected};
  plan.replications = 3;
  plan.base_seed = 4242;

  const std::vector<ResultRow> rows = speco::run_sweep(plan);
  REQUIRE(rows.size() == 2 * 3 * 2);

  std::size_t idx = 0;
  for (int cell = 0; cell < 2; ++cell)
    for (int rep = 0; rep < 3; ++rep) {
      const std::uint64_t unit_seed = rows[idx].seed;
      CHECK(rows[idx].omega == (cell == 0 ? 1.0 : 2.0));
      CHECK(rows[idx].estimator_name == "pca_oracle_data");
      CHECK(rows[idx].replication_index == rep);
      CHECK(rows[idx + 1].estimator_name == "sdp_corrected");
      // Paired design: both estimators in a unit share the dataset seed.
      CHECK(rows[idx + 1].seed == unit_seed);
      CHECK(rows[idx].scenario == "uniform_missing");
      CHECK(rows[idx].delta_label == "0.8");
      idx += 2;
    }

  for (const ResultRow& r : rows) {
    CHECK(r.failure.empty());
    CHECK(r.error >= 0.0);
    CHECK(r.error <= 2.0);
    CHECK(r.iterations >= 0);
    CHECK(r.runtime_ms >= 0.0);
  }
  // Vanilla PCA needs no iterations.
  CHECK(rows[0].iterations == 0);
}

TEST_CASE("sweep error values are reproducible across runs and thread counts") {
  SweepPlan plan;
  plan.cells.push_back(SweepCell{uniform_config(30, 8, 1.5, 0.7), "0.7"});
  plan.estimators = {EstimatorKind::sdp_corrected, EstimatorKind::refined};
  plan.replications = 2;
  plan.base_seed = 777;

  const std::vector<ResultRow> a = speco::run_sweep(plan);
  plan.threads = 2;
  const std::vector<ResultRow> b = speco::run_sweep(plan);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].error == b[i].error);
    CHECK(a[i].iterations == b[i].iterations);
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].estimator_name == b[i].estimator_name);
  }
}
