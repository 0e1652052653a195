#include "speco/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "speco/linalg.hpp"

namespace speco {

double effective_delta(const CorrectionSpec& spec) {
  switch (spec.variant) {
    case CorrectionKind::none:
      return 1.0;
    case CorrectionKind::uniform_missing:
    case CorrectionKind::lowrank:
      return spec.delta;
    case CorrectionKind::nonuniform: {
      if (spec.delta_vec.empty())
        throw std::invalid_argument("effective_delta: nonuniform correction without delta_vec");
      double s = 0.0;
      for (double d : spec.delta_vec) s += d;
      return s / static_cast<double>(spec.delta_vec.size());
    }
    case CorrectionKind::multiplicative: {
      if (!spec.m.square() || spec.m.rows() == 0)
        throw std::invalid_argument("effective_delta: multiplicative correction without M");
      double lo = spec.m(0, 0);
      for (std::size_t j = 1; j < spec.m.rows(); ++j) lo = std::min(lo, spec.m(j, j));
      return std::min(1.0, lo);
    }
  }
  throw std::invalid_argument("effective_delta: unknown correction kind");
}

PipelineResult run_pipeline(const ObservedData& data, const CorrectionSpec& correction,
                            const SolverSettings& solver, bool run_refine) {
  if (solver.mu && *solver.mu < 0.0)
    throw std::invalid_argument("run_pipeline: mu must be nonnegative");
  if (solver.lambda && *solver.lambda < 0.0)
    throw std::invalid_argument("run_pipeline: lambda must be nonnegative");
  if (solver.mu_scale < 0.0 || solver.lambda_scale < 0.0)
    throw std::invalid_argument("run_pipeline: scale factors must be nonnegative");

  PipelineResult out;
  out.sigma = apply_correction(data, correction);

  {
    const linalg::SymEig eig = linalg::eig_sym(out.sigma.matrix);
    out.sigma.min_eigenvalue_hint = eig.values.front();
    out.max_eigenvalue_hint = eig.values.back();
  }

  out.mu_used = solver.mu ? *solver.mu
                          : default_mu(static_cast<int>(data.n_cols()),
                                       static_cast<int>(data.n_rows()),
                                       effective_delta(correction), solver.mu_scale);

  FantopeProblem prob;
  prob.sigma = out.sigma;
  prob.mu = out.mu_used;
  prob.rho = solver.rho;
  prob.max_iter = solver.sdp_max_iter;
  prob.tol_abs = solver.tol_abs;
  prob.tol_rel = solver.tol_rel;
  out.sdp = solve_fantope(prob);

  out.init = make_initial(out.sigma, out.sdp);
  out.degenerate_fallback = out.init.degenerate;

  out.beta_hat = out.degenerate_fallback ? out.init.u1 : out.init.beta_init;
  if (run_refine) refine_stage(out, solver);
  return out;
}

void refine_stage(PipelineResult& result, const SolverSettings& solver) {
  const Vec& start = result.degenerate_fallback ? result.init.u1 : result.init.beta_init;
  result.lambda_used = solver.lambda
                           ? *solver.lambda
                           : result.mu_used * l2_norm(start) * solver.lambda_scale;
  RefineConfig rc;
  rc.lambda = result.lambda_used;
  rc.q_bound = solver.q_bound;
  rc.ball_radius = solver.ball_radius;
  rc.max_iter = solver.refine_max_iter;
  rc.stat_tol = solver.stat_tol;
  rc.step_shrink = solver.step_shrink;
  rc.initial_step = solver.initial_step;
  result.refined = refine(result.sigma, result.init, rc);
  result.beta_hat = result.refined->beta;
}

}  // namespace speco
