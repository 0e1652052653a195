#include "speco/fantope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "speco/kernels.hpp"
#include "speco/linalg.hpp"

namespace speco {

namespace {

double capped_sum(const Vec& lam, double theta) {
  double s = 0.0;
  for (double v : lam) s += std::clamp(v - theta, 0.0, 1.0);
  return s;
}

// Water-filling threshold: the unique theta with sum_i clamp(lam_i - theta,
// 0, 1) = 1. The sum is continuous and nonincreasing in theta, >= 1 at
// lam_min - 1 and 0 at lam_max, so bisection always brackets the root. If the
// slope is too steep for bisection to land within 1e-12 of the target sum
// (possible for very large spectra), the exact root of the final linear
// segment is solved in closed form.
double waterfill_theta(const Vec& lam) {
  double lo = lam.front() - 1.0;
  double hi = lam.back();
  double theta = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    theta = 0.5 * (lo + hi);
    const double s = capped_sum(lam, theta);
    if (std::abs(s - 1.0) <= 1e-12) return theta;
    if (s > 1.0)
      lo = theta;
    else
      hi = theta;
    if (!(lo < theta || theta < hi)) break;  // interval collapsed to machine resolution
  }
  int active = 0;
  int capped = 0;
  double active_sum = 0.0;
  for (double v : lam) {
    const double d = v - theta;
    if (d >= 1.0) {
      ++capped;
    } else if (d > 0.0) {
      ++active;
      active_sum += v;
    }
  }
  if (active > 0) theta = (active_sum + capped - 1.0) / active;
  return theta;
}

}  // namespace

Mat project_fantope(const Mat& a) {
  if (!a.square()) throw std::invalid_argument("project_fantope: matrix must be square");
  const linalg::SymEig eig = linalg::eig_sym(a);  // throws on non-finite input
  const double theta = waterfill_theta(eig.values);

  const std::size_t p = a.rows();
  Vec gamma;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < p; ++i)
    if (eig.values[i] - theta > 0.0) ++kept;
  Mat selected(kept, p);
  gamma.reserve(kept);
  std::size_t r = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const double g = std::clamp(eig.values[i] - theta, 0.0, 1.0);
    if (g > 0.0) {
      gamma.push_back(g);
      std::copy(eig.vectors.row(i), eig.vectors.row(i) + p, selected.row(r));
      ++r;
    }
  }
  return linalg::weighted_outer_sum(selected, gamma);
}

Mat soft_threshold(const Mat& a, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("soft_threshold: kappa must be nonnegative");
  Mat out(a.rows(), a.cols());
  kernels::ops().soft_threshold(a.data(), kappa, out.data(), a.size());
  return out;
}

Vec soft_threshold(const Vec& v, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("soft_threshold: kappa must be nonnegative");
  Vec out(v.size());
  kernels::ops().soft_threshold(v.data(), kappa, out.data(), v.size());
  return out;
}

FantopeSolution solve_fantope(const FantopeProblem& problem) {
  const Mat& sig = problem.sigma.matrix;
  if (!sig.square() || sig.rows() < 2)
    throw std::invalid_argument("solve_fantope: sigma must be p x p with p >= 2");
  if (!all_finite(sig)) throw std::invalid_argument("solve_fantope: sigma has non-finite entries");
  if (problem.mu < 0.0) throw std::invalid_argument("solve_fantope: mu must be nonnegative");
  if (!(problem.rho > 0.0)) throw std::invalid_argument("solve_fantope: rho must be positive");
  if (!(problem.tol_abs > 0.0) || !(problem.tol_rel > 0.0))
    throw std::invalid_argument("solve_fantope: tolerances must be positive");
  if (problem.max_iter < 1) throw std::invalid_argument("solve_fantope: max_iter must be >= 1");

  const std::size_t p = sig.rows();
  const std::size_t nn = p * p;
  const auto& kr = kernels::ops();
  const double inv_rho = 1.0 / problem.rho;
  const double kappa = problem.mu * inv_rho;
  const auto pd = static_cast<double>(p);

  Mat f(p, p);
  Mat g(p, p);
  Mat u(p, p);
  Mat gprev(p, p);
  Mat work(p, p);
  FantopeSolution out;
  double rp = std::numeric_limits<double>::infinity();
  double rd = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < problem.max_iter) {
    ++it;
    kr.combine_gus(g.data(), u.data(), sig.data(), inv_rho, work.data(), nn);
    f = project_fantope(work);
    std::swap(gprev, g);
    kr.axpby(1.0, f.data(), 1.0, u.data(), work.data(), nn);
    kr.soft_threshold(work.data(), kappa, g.data(), nn);
    kr.accum_diff(f.data(), g.data(), u.data(), nn);

    rp = std::sqrt(kr.diff_nrm2sq(f.data(), g.data(), nn));
    rd = problem.rho * std::sqrt(kr.diff_nrm2sq(g.data(), gprev.data(), nn));
    out.objective_trace.push_back(-kr.dot(sig.data(), g.data(), nn) +
                                  problem.mu * kr.l1_norm(g.data(), nn));

    const double nf = std::sqrt(kr.nrm2sq(f.data(), nn));
    const double ng = std::sqrt(kr.nrm2sq(g.data(), nn));
    const double ndual = problem.rho * std::sqrt(kr.nrm2sq(u.data(), nn));
    const double eps_primal = problem.tol_abs * pd + problem.tol_rel * std::max(nf, ng);
    const double eps_dual = problem.tol_abs * pd + problem.tol_rel * ndual;
    if (rp <= eps_primal && rd <= eps_dual) {
      out.converged = true;
      break;
    }
  }
  out.iterations = it;
  out.primal_residual = rp;
  out.dual_residual = rd;
  // Report the projection-step iterate: it is exactly Fantope-feasible, while
  // the l1 iterate is only feasible up to the primal residual.
  symmetrize(f);
  out.objective = -linalg::fro_dot(sig, f) + problem.mu * kr.l1_norm(f.data(), nn);
  out.f = std::move(f);
  return out;
}

double default_mu(int p, int n, double delta, double scale) {
  if (p < 2) throw std::invalid_argument("default_mu: p must be >= 2");
  if (n < 1) throw std::invalid_argument("default_mu: n must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("default_mu: delta must lie in (0,1]");
  if (scale < 0.0) throw std::invalid_argument("default_mu: scale must be nonnegative");
  return scale * std::sqrt(std::log(static_cast<double>(p)) /
                           (delta * delta * static_cast<double>(n)));
}

}  // namespace speco
