#pragma once

#include <limits>
#include <vector>

#include "speco/correction.hpp"
#include "speco/dense.hpp"
#include "speco/initial.hpp"

namespace speco {

struct RefineConfig {
  double lambda = 0.0;  // l1 penalty weight, >= 0
  double q_bound = std::numeric_limits<double>::infinity();      // l1 budget Q
  double ball_radius = std::numeric_limits<double>::infinity();  // l2 trust region around the start
  int max_iter = 5000;
  double stat_tol = 1e-8;
  // Backtracking line search: step restarts at initial_step each iteration and
  // shrinks by step_shrink until sufficient decrease holds. initial_step <= 0
  // selects 1 / (3*||start||^2 + ||sigma||_F + 1e-12), a cheap Lipschitz
  // surrogate for the risk Hessian ||b||^2 I + 2 b b' - sigma.
  double step_shrink = 0.5;
  double initial_step = 0.0;
};

struct RefinedEstimate {
  Vec beta;
  int iterations = 0;
  // ||beta - ProxStep(beta)||_2 where ProxStep applies one gradient step at
  // the final step size, soft-thresholds, then projects onto the constraints.
  // The composite map (prox of the penalty followed by constraint projection)
  // is the fixed-point condition the solver enforces; it is not the exact
  // prox of penalty + constraints when a constraint is active.
  double stationarity_gap = 0.0;
  double objective = 0.0;
  bool l1_active = false;  // q_bound finite and tight at the solution
  bool l2_active = false;  // ball_radius finite and tight at the solution
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each accepted step
};

// grad of (1/4)||sigma - b b'||_F^2: ||b||^2 b - sigma b.
Vec risk_gradient(const CorrectedCovariance& sigma, const Vec& beta);

// Euclidean projection onto {||b||_1 <= q_bound} ∩ {||b - center||_2 <= ball_radius}
// via Dykstra's alternating projections (exact sort-based l1 projection, radial
// l2 projection), run to 1e-10 change or 200 rounds. Either radius may be
// infinite; with both infinite this is the identity.
Vec project_constraints(const Vec& beta, const Vec& center, double q_bound, double ball_radius);

// (1/4)||sigma - b b'||_F^2 + lambda ||b||_1, evaluated in the expanded
// O(p^2) form (1/4)(||sigma||_F^2 - 2 b' sigma b + ||b||^4) + lambda ||b||_1.
double objective_value(const CorrectedCovariance& sigma, const Vec& beta, double lambda);

// Projected proximal gradient from init.beta_init (or init.u1 when the
// initializer degenerated to zero), with per-iteration backtracking and a
// monotone nonincreasing objective. Stops when
// stationarity_gap <= stat_tol * (1 + ||beta||_2) or at max_iter.
// Throws std::runtime_error if the objective turns non-finite.
RefinedEstimate refine(const CorrectedCovariance& sigma, const InitialEstimate& init,
                       const RefineConfig& config);

}  // namespace speco
