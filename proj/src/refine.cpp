#include "speco/refine.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "speco/kernels.hpp"
#include "speco/linalg.hpp"

namespace speco {

namespace {

// Exact Euclidean projection onto {||b||_1 <= q}: sort |v| descending, find
// the largest support size whose simplex threshold stays positive, then
// soft-threshold at that level.
Vec project_l1_ball(const Vec& v, double q) {
  const auto& kr = kernels::ops();
  if (std::isinf(q) || kr.l1_norm(v.data(), v.size()) <= q) return v;
  Vec a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
  std::sort(a.begin(), a.end(), std::greater<double>());
  double csum = 0.0;
  double csum_rho = 0.0;
  std::size_t rho = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    csum += a[j];
    if (a[j] - (csum - q) / static_cast<double>(j + 1) > 0.0) {
      rho = j + 1;
      csum_rho = csum;
    }
  }
  Vec out(v.size(), 0.0);
  if (rho == 0) return out;
  const double tau = (csum_rho - q) / static_cast<double>(rho);
  kr.soft_threshold(v.data(), tau, out.data(), v.size());
  return out;
}

Vec project_l2_ball(const Vec& v, const Vec& center, double radius) {
  const auto& kr = kernels::ops();
  if (std::isinf(radius)) return v;
  const double dist = std::sqrt(kr.diff_nrm2sq(v.data(), center.data(), v.size()));
  if (dist <= radius) return v;
  const double s = radius / dist;
  Vec out(v.size());
  kr.axpby(s, v.data(), 1.0 - s, center.data(), out.data(), v.size());
  return out;
}

}  // namespace

Vec risk_gradient(const CorrectedCovariance& sigma, const Vec& beta) {
  const Mat& s = sigma.matrix;
  if (!s.square() || s.rows() != beta.size())
    throw std::invalid_argument("risk_gradient: sigma and beta dimensions must match");
  const auto& kr = kernels::ops();
  const Vec sb = linalg::matvec(s, beta);
  const double bn2 = kr.nrm2sq(beta.data(), beta.size());
  Vec out(beta.size());
  kr.axpby(bn2, beta.data(), -1.0, sb.data(), out.data(), beta.size());
  return out;
}

Vec project_constraints(const Vec& beta, const Vec& center, double q_bound, double ball_radius) {
  if (!(q_bound > 0.0) || !(ball_radius > 0.0))
    throw std::invalid_argument("project_constraints: radii must be positive");
  const bool l1_finite = !std::isinf(q_bound);
  const bool l2_finite = !std::isinf(ball_radius);
  if (!l1_finite && !l2_finite) return beta;
  if (l2_finite && beta.size() != center.size())
    throw std::invalid_argument("project_constraints: center dimension mismatch");
  if (!l2_finite) return project_l1_ball(beta, q_bound);
  if (!l1_finite) return project_l2_ball(beta, center, ball_radius);

  // Dykstra's alternating projections onto the intersection; the l1
  // projection runs last so the sparsity constraint is exact at return.
  const auto& kr = kernels::ops();
  const std::size_t n = beta.size();
  Vec x = beta;
  Vec p_inc(n, 0.0);
  Vec q_inc(n, 0.0);
  Vec work(n);
  for (int round = 0; round < 200; ++round) {
    const Vec x_prev = x;
    kr.axpby(1.0, x.data(), 1.0, p_inc.data(), work.data(), n);
    const Vec y = project_l2_ball(work, center, ball_radius);
    kr.axpby(1.0, work.data(), -1.0, y.data(), p_inc.data(), n);
    kr.axpby(1.0, y.data(), 1.0, q_inc.data(), work.data(), n);
    x = project_l1_ball(work, q_bound);
    kr.axpby(1.0, work.data(), -1.0, x.data(), q_inc.data(), n);
    if (std::sqrt(kr.diff_nrm2sq(x.data(), x_prev.data(), n)) <= 1e-10) break;
  }
  return x;
}

double objective_value(const CorrectedCovariance& sigma, const Vec& beta, double lambda) {
  const Mat& s = sigma.matrix;
  if (!s.square() || s.rows() != beta.size())
    throw std::invalid_argument("objective_value: sigma and beta dimensions must match");
  const auto& kr = kernels::ops();
  const double sig_fro2 = kr.nrm2sq(s.data(), s.size());
  const double bn2 = kr.nrm2sq(beta.data(), beta.size());
  const double q = linalg::quad_form(s, beta);
  return 0.25 * (sig_fro2 - 2.0 * q + bn2 * bn2) + lambda * kr.l1_norm(beta.data(), beta.size());
}

RefinedEstimate refine(const CorrectedCovariance& sigma, const InitialEstimate& init,
                       const RefineConfig& config) {
  const Mat& sig = sigma.matrix;
  if (!sig.square() || sig.rows() < 1)
    throw std::invalid_argument("refine: sigma must be square and nonempty");
  if (!all_finite(sig)) throw std::invalid_argument("refine: sigma has non-finite entries");
  if (config.lambda < 0.0) throw std::invalid_argument("refine: lambda must be nonnegative");
  if (!(config.q_bound > 0.0)) throw std::invalid_argument("refine: q_bound must be positive");
  if (!(config.ball_radius > 0.0))
    throw std::invalid_argument("refine: ball_radius must be positive");
  if (config.max_iter < 1) throw std::invalid_argument("refine: max_iter must be >= 1");
  if (!(config.stat_tol > 0.0)) throw std::invalid_argument("refine: stat_tol must be positive");
  if (!(config.step_shrink > 0.0 && config.step_shrink < 1.0))
    throw std::invalid_argument("refine: step_shrink must lie in (0,1)");

  const auto& kr = kernels::ops();
  const std::size_t p = sig.rows();

  Vec start = init.beta_init;
  if (start.empty() || l2_norm(start) == 0.0) start = init.u1;  // degenerate-initializer fallback
  if (start.size() != p) throw std::invalid_argument("refine: initial estimate dimension mismatch");
  if (l2_norm(start) == 0.0)
    throw std::invalid_argument("refine: initial estimate is identically zero");

  const double sig_fro2 = kr.nrm2sq(sig.data(), sig.size());
  const double lambda = config.lambda;
  const auto phi = [&](const Vec& b) {
    const double bn2 = kr.nrm2sq(b.data(), p);
    return 0.25 * (sig_fro2 - 2.0 * linalg::quad_form(sig, b) + bn2 * bn2) +
           lambda * kr.l1_norm(b.data(), p);
  };

  double t0 = config.initial_step;
  if (!(t0 > 0.0))
    t0 = 1.0 / (3.0 * kr.nrm2sq(start.data(), p) + std::sqrt(sig_fro2) + 1e-12);

  RefinedEstimate out;
  const Vec center = start;
  Vec beta = start;
  double obj = phi(beta);
  const auto diverged = [&]() {
    throw std::runtime_error("refine: non-finite objective encountered (iterate history length " +
                             std::to_string(out.objective_trace.size()) + ")");
  };
  if (!std::isfinite(obj)) diverged();

  Vec shifted(p);
  Vec thresh(p);
  // One composite step from b with backtracking: gradient step, soft
  // threshold, constraint projection. Returns the candidate's objective.
  const auto prox_step = [&](const Vec& b, double obj_b, Vec& cand, double& t_used) {
    const Vec grad = risk_gradient(sigma, b);
    double t = t0;
    double obj_c = obj_b;
    for (;;) {
      kr.axpby(1.0, b.data(), -t, grad.data(), shifted.data(), p);
      kr.soft_threshold(shifted.data(), t * lambda, thresh.data(), p);
      cand = project_constraints(thresh, center, config.q_bound, config.ball_radius);
      obj_c = phi(cand);
      if (!std::isfinite(obj_c)) diverged();
      const double move2 = kr.diff_nrm2sq(cand.data(), b.data(), p);
      if (obj_c <= obj_b - 1e-4 * move2 / t) break;
      t *= config.step_shrink;
      if (t < 1e-20) {  // unreachable for finite curvature; refuse to move uphill
        cand = b;
        obj_c = obj_b;
        break;
      }
    }
    t_used = t;
    return obj_c;
  };

  int it = 0;
  bool converged = false;
  double gap = 0.0;
  Vec cand(p);
  for (;;) {
    double t_used = t0;
    const double obj_c = prox_step(beta, obj, cand, t_used);
    gap = std::sqrt(kr.diff_nrm2sq(beta.data(), cand.data(), p));
    if (gap <= config.stat_tol * (1.0 + std::sqrt(kr.nrm2sq(beta.data(), p)))) {
      converged = true;
      break;
    }
    if (it == config.max_iter) break;
    beta = cand;
    obj = obj_c;
    ++it;
    out.objective_trace.push_back(obj);
  }

  out.iterations = it;
  out.stationarity_gap = gap;
  out.objective = obj;
  out.converged = converged;
  if (!std::isinf(config.q_bound))
    out.l1_active = kr.l1_norm(beta.data(), p) >= config.q_bound - 1e-8;
  if (!std::isinf(config.ball_radius))
    out.l2_active =
        std::sqrt(kr.diff_nrm2sq(beta.data(), center.data(), p)) >= config.ball_radius - 1e-8;
  out.beta = std::move(beta);
  return out;
}

}  // namespace speco
