#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "speco/correction.hpp"
#include "speco/data.hpp"
#include "speco/dense.hpp"
#include "speco/simulate.hpp"

// Independent oracles for the numerical core. Each one recomputes a quantity
// the solvers produce, by a deliberately different route (exact piecewise
// solves, dense grid search, finite differences, Monte Carlo), so agreement
// is evidence rather than tautology. Shared by `speco selfcheck`, the unit
// tests, and the release acceptance harness.
namespace speco::checks {

// Exact water-filling weights: gamma_i = clamp(lambda_i - theta, 0, 1) with
// sum(gamma) = 1, where theta is found by walking the sorted breakpoints of
// the piecewise-linear constraint sum and solving the crossing segment in
// closed form - no bisection involved.
Vec capped_spectrum_exact(const Vec& eigenvalues);

// Reference Fantope projection: eigendecompose, apply capped_spectrum_exact,
// reconstruct with a naive triple loop (no BLAS).
Mat project_fantope_reference(const Mat& a);

// -<sigma, F> + mu * ||F||_1, the relaxation objective.
double fantope_objective(const Mat& sigma, const Mat& f, double mu);

// Global minimum of the relaxation objective over the 2x2 Fantope, by dense
// grid search over its disk parametrization F = 1/2 I + [[u, v], [v, -u]]
// with u^2 + v^2 <= 1/4 (polar grid, then six zoom refinements around the
// incumbent). Independent of both the ADMM loop and the projection.
double fantope2x2_grid_min(const Mat& sigma, double mu);

// Central finite differences of the direct (un-expanded) Frobenius risk
// (1/4)||sigma - b b'||_F^2 at step h.
Vec fd_risk_gradient(const Mat& sigma, const Vec& beta, double h);

struct CheckReport {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst observed discrepancy
  double bound = 0.0;     // what it must stay under
  std::string detail;
};

// Monte-Carlo unbiasedness: replication-mean of the corrected matrix vs the
// scenario target (sigma0, or X'X for the low-rank design), per entry, in
// standard-error units. The correction is pluggable so mutation tests can
// verify the oracle actually bites.
using CorrectionFn = std::function<CorrectedCovariance(const ObservedData&)>;
CheckReport check_unbiasedness(const ScenarioConfig& config, int replications,
                               std::uint64_t base_seed, const CorrectionFn& correction);

CheckReport check_projection_oracle(int instances, std::uint64_t seed);
CheckReport check_sdp_grid_oracle(std::uint64_t seed);
CheckReport check_gradient_oracle(int instances, std::uint64_t seed);

// The full oracle suite at the documented sizes (unbiasedness at p=5,
// n=5000, 200 replications for each of the four corrections; 100 projection
// and gradient instances; grid-search SDP oracle).
std::vector<CheckReport> run_selfcheck();

}  // namespace speco::checks
