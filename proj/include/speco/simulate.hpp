#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speco/correction.hpp"
#include "speco/data.hpp"
#include "speco/dense.hpp"
#include "speco/pipeline.hpp"

namespace speco {

// Rank-one spiked covariance: sigma0 = omega * beta0 beta0' + I.
struct SpikedModel {
  std::size_t p = 0;
  double omega = 0.0;
  Vec beta0;
  Mat sigma0;
};

// Default spike direction (1,1,1,1,0,...,0): the first min(p,4) coordinates.
SpikedModel make_spiked_model(std::size_t p, double omega);
SpikedModel make_spiked_model(std::size_t p, double omega, Vec beta0);

// Distribution of the i.i.d. multiplicative-noise entries U_ij.
enum class NoiseFamily { bernoulli, uniform };
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::bernoulli;
  double delta = 1.0;  // bernoulli observation probability
  double lo = 1.0;     // uniform support [lo, hi], 0 < lo <= hi
  double hi = 1.0;
};

// Closed-form M = E[U1 U1'] for i.i.d. entries: off-diagonal m1^2, diagonal m2.
Mat analytic_m(const NoiseSpec& noise, std::size_t p);

struct ScenarioConfig {
  Scenario scenario = Scenario::full;
  std::size_t n = 0;
  SpikedModel model;

  double delta = 1.0;  // uniform_missing and lowrank_additive_missing mask level
  Vec delta_vec;       // nonuniform_missing per-variable observation probabilities
  NoiseSpec noise;     // multiplicative

  // lowrank_additive_missing: fixed X = sqrt(n) d1 u v1' with u = ones/sqrt(n)
  // and v1 = beta0/||beta0||, additive noise rows W_i ~ N(0, sigma_noise^2 I).
  double d1 = 1.0;
  double sigma_noise = 1.0;
};

struct Dataset {
  ObservedData data;
  Vec ground_truth;          // true direction: beta0, or v1 for the low-rank scenario
  Mat mask;                  // 1 = observed, 0 = missing (all ones when nothing is masked)
  double observed_fraction = 1.0;
};

// Range checks for every scenario parameter; throws std::invalid_argument.
void validate_scenario(const ScenarioConfig& config);

// Deterministic per (config, seed): the sample matrix is drawn first (row-major),
// then the corruption (row-major). Observations are zero-filled where masked.
Dataset generate(const ScenarioConfig& config, std::uint64_t seed);

// The bias correction whose assumptions match the generating scenario.
CorrectionSpec matching_correction(const ScenarioConfig& config);

// || aa'/||a||^2 - bb'/||b||^2 ||_F, computed as sqrt(2 - 2 cos^2) in O(p).
// Sign- and scale-invariant; throws on a zero vector.
double estimation_error(const Vec& beta_hat, const Vec& beta_true);

enum class EstimatorKind { pca_oracle_data, sdp_corrected, sdp_uncorrected, refined };
const char* to_string(EstimatorKind k);
EstimatorKind estimator_from_string(const std::string& name);

struct ResultRow {
  std::string scenario;
  double omega = 0.0;
  std::string delta_label;
  int replication_index = 0;
  std::string estimator_name;
  double error = 0.0;     // NaN when the estimator failed
  int iterations = 0;     // -1 when the estimator failed
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::string failure;    // diagnostic tag, empty on success; not a CSV column
};

struct SweepCell {
  ScenarioConfig config;
  std::string delta_label;
};

struct SweepPlan {
  std::vector<SweepCell> cells;
  std::vector<EstimatorKind> estimators;
  int replications = 1;
  std::uint64_t base_seed = 0;
  SolverSettings solver;
  int threads = 1;
};

// Runs each estimator on the identical dataset within a (cell, replication)
// unit (paired design); unit seeds derive from (base_seed, cell, replication).
// Rows come back in canonical order (cell-major, then replication, then
// estimator in plan order) regardless of thread interleaving. Estimator
// failures become rows with error = NaN, iterations = -1, and a failure tag;
// the sweep itself never aborts mid-grid.
std::vector<ResultRow> run_sweep(const SweepPlan& plan);

}  // namespace speco
