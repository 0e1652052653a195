#pragma once

#include "speco/correction.hpp"

namespace speco {

// ADMM instance for the penalized Fantope program
//   minimize  -trace(sigma F) + mu * ||F||_1
//   over      {F symmetric : trace(F) = 1, 0 <= F <= I}.
struct FantopeProblem {
  CorrectedCovariance sigma;
  double mu = 0.0;
  double rho = 1.0;
  int max_iter = 2000;
  double tol_abs = 1e-6;
  double tol_rel = 1e-5;
};

struct FantopeSolution {
  Mat f;  // exactly feasible: the last projection output, symmetrized
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;  // -trace(sigma F) + mu * ||F||_1 at the reported F
  bool converged = false;
  Vec objective_trace;  // objective at the l1 iterate, one entry per iteration
};

// Frobenius-nearest point of the Fantope. Eigenvalues are shifted by the
// water-filling threshold and clamped to [0,1].
Mat project_fantope(const Mat& a);

Mat soft_threshold(const Mat& a, double kappa);
Vec soft_threshold(const Vec& v, double kappa);

FantopeSolution solve_fantope(const FantopeProblem& problem);

// Practical penalty level: scale * sqrt(log(p) / (delta^2 * n)).
double default_mu(int p, int n, double delta, double scale = 1.0);

}  // namespace speco
