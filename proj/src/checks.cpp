#include "speco/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "speco/fantope.hpp"
#include "speco/linalg.hpp"
#include "speco/refine.hpp"
#include "speco/rng.hpp"

namespace speco::checks {

namespace {

double capped_sum(const Vec& lam, double theta) {
  double s = 0.0;
  for (double v : lam) s += std::clamp(v - theta, 0.0, 1.0);
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Mat random_symmetric(std::size_t p, double amplitude, Rng& rng) {
  Mat a(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      const double v = rng.uniform(-amplitude, amplitude);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

double fro_diff(const Mat& a, const Mat& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double direct_risk(const Mat& sigma, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma.rows(); ++i)
    for (std::size_t j = 0; j < sigma.cols(); ++j) {
      const double d = sigma(i, j) - b[i] * b[j];
      acc += d * d;
    }
  return 0.25 * acc;
}

}  // namespace

Vec capped_spectrum_exact(const Vec& eigenvalues) {
  if (eigenvalues.empty())
    throw std::invalid_argument("capped_spectrum_exact: empty spectrum");
  const Vec& lam = eigenvalues;

  std::vector<double> bps;
  bps.reserve(2 * lam.size());
  for (double v : lam) {
    bps.push_back(v);
    bps.push_back(v - 1.0);
  }
  std::sort(bps.begin(), bps.end(), std::greater<double>());

  // Walk the breakpoints from the top; the constraint sum grows from 0 toward
  // p as theta decreases, so the first breakpoint at or above 1 closes the
  // crossing segment, which is then solved exactly.
  double theta = bps.front();
  double prev = bps.front();
  for (double bp : bps) {
    const double s = capped_sum(lam, bp);
    if (s >= 1.0) {
      if (s == 1.0) {
        theta = bp;
      } else {
        const double mid = 0.5 * (bp + prev);
        int capped = 0;
        int active = 0;
        double active_sum = 0.0;
        for (double v : lam) {
          const double d = v - mid;
          if (d >= 1.0) {
            ++capped;
          } else if (d > 0.0) {
            ++active;
            active_sum += v;
          }
        }
        theta = active > 0 ? (active_sum + capped - 1.0) / active : bp;
      }
      break;
    }
    prev = bp;
  }

  Vec gamma(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) gamma[i] = std::clamp(lam[i] - theta, 0.0, 1.0);
  return gamma;
}

Mat project_fantope_reference(const Mat& a) {
  if (!a.square()) throw std::invalid_argument("project_fantope_reference: matrix must be square");
  const linalg::SymEig eig = linalg::eig_sym(a);
  const Vec gamma = capped_spectrum_exact(eig.values);
  const std::size_t p = a.rows();
  Mat f(p, p);
  for (std::size_t k = 0; k < p; ++k) {
    if (gamma[k] == 0.0) continue;
    const double* v = eig.vectors.row(k);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) f(i, j) += gamma[k] * v[i] * v[j];
  }
  return f;
}

double fantope_objective(const Mat& sigma, const Mat& f, double mu) {
  if (!sigma.square() || sigma.rows() != f.rows() || !f.square())
    throw std::invalid_argument("fantope_objective: dimension mismatch");
  double inner = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    inner += sigma.data()[i] * f.data()[i];
    l1 += std::abs(f.data()[i]);
  }
  return -inner + mu * l1;
}

double fantope2x2_grid_min(const Mat& sigma, double mu) {
  if (!sigma.square() || sigma.rows() != 2)
    throw std::invalid_argument("fantope2x2_grid_min: sigma must be 2x2");
  if (mu < 0.0) throw std::invalid_argument("fantope2x2_grid_min: mu must be nonnegative");
  const double s11 = sigma(0, 0);
  const double s22 = sigma(1, 1);
  const double s12 = 0.5 * (sigma(0, 1) + sigma(1, 0));

  // F = [[1/2 + u, v], [v, 1/2 - u]] is Fantope-feasible iff u^2 + v^2 <= 1/4.
  const auto objective = [&](double u, double v) {
    return -(s11 * (0.5 + u) + s22 * (0.5 - u) + 2.0 * s12 * v) +
           mu * (std::abs(0.5 + u) + std::abs(0.5 - u) + 2.0 * std::abs(v));
  };

  const double two_pi = 2.0 * 3.14159265358979323846;
  double best = objective(0.0, 0.0);
  double best_r = 0.0;
  double best_phi = 0.0;
  double dr = 0.5 / 600.0;
  double dphi = two_pi / 1500.0;
  for (int ir = 0; ir <= 600; ++ir) {
    const double r = ir * dr;
    for (int ip = 0; ip < 1500; ++ip) {
      const double phi = ip * dphi;
      const double val = objective(r * std::cos(phi), r * std::sin(phi));
      if (val < best) {
        best = val;
        best_r = r;
        best_phi = phi;
      }
    }
  }
  for (int level = 0; level < 6; ++level) {
    const double r_lo = std::max(0.0, best_r - 6.0 * dr);
    const double r_hi = std::min(0.5, best_r + 6.0 * dr);
    const double phi_lo = best_phi - 6.0 * dphi;
    const double phi_hi = best_phi + 6.0 * dphi;
    dr = (r_hi - r_lo) / 60.0;
    dphi = (phi_hi - phi_lo) / 60.0;
    for (int ir = 0; ir <= 60; ++ir) {
      const double r = r_lo + ir * dr;
      for (int ip = 0; ip <= 60; ++ip) {
        const double phi = phi_lo + ip * dphi;
        const double val = objective(r * std::cos(phi), r * std::sin(phi));
        if (val < best) {
          best = val;
          best_r = r;
          best_phi = phi;
        }
      }
    }
  }
  return best;
}

Vec fd_risk_gradient(const Mat& sigma, const Vec& beta, double h) {
  if (!sigma.square() || sigma.rows() != beta.size())
    throw std::invalid_argument("fd_risk_gradient: dimension mismatch");
  if (!(h > 0.0)) throw std::invalid_argument("fd_risk_gradient: h must be positive");
  Vec fd(beta.size());
  Vec b = beta;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    b[i] = beta[i] + h;
    const double up = direct_risk(sigma, b);
    b[i] = beta[i] - h;
    const double down = direct_risk(sigma, b);
    b[i] = beta[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  return fd;
}

CheckReport check_unbiasedness(const ScenarioConfig& config, int replications,
                               std::uint64_t base_seed, const CorrectionFn& correction) {
  validate_scenario(config);
  if (replications < 2)
    throw std::invalid_argument("check_unbiasedness: need at least 2 replications");
  const std::size_t p = config.model.p;

  Mat target;
  if (config.scenario == Scenario::lowrank_additive_missing) {
    Vec v1 = config.model.beta0;
    const double inv = 1.0 / l2_norm(v1);
    for (double& v : v1) v *= inv;
    target = outer(v1);
    const double scale = static_cast<double>(config.n) * config.d1 * config.d1;
    for (std::size_t i = 0; i < target.size(); ++i) target.data()[i] *= scale;
  } else {
    target = config.model.sigma0;
  }

  Mat sum(p, p);
  Mat sumsq(p, p);
  for (int r = 0; r < replications; ++r) {
    const Dataset ds = generate(config, mix_seed(base_seed, 0, static_cast<std::uint64_t>(r)));
    const CorrectedCovariance c = correction(ds.data);
    if (c.matrix.rows() != p || c.matrix.cols() != p)
      throw std::invalid_argument("check_unbiasedness: correction output has wrong shape");
    for (std::size_t i = 0; i < p * p; ++i) {
      const double v = c.matrix.data()[i];
      sum.data()[i] += v;
      sumsq.data()[i] += v * v;
    }
  }

  const double nrep = static_cast<double>(replications);
  double max_z = 0.0;
  int violations = 0;
  for (std::size_t i = 0; i < p * p; ++i) {
    const double mean = sum.data()[i] / nrep;
    const double var =
        std::max(0.0, (sumsq.data()[i] - nrep * mean * mean) / (nrep - 1.0));
    const double se = std::sqrt(var / nrep);
    const double dev = std::abs(mean - target.data()[i]);
    const double z = se > 0.0 ? dev / se
                              : (dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    max_z = std::max(max_z, z);
    if (z > 3.0) ++violations;
  }

  CheckReport rep;
  rep.name = std::string("unbiasedness/") + to_string(config.scenario);
  rep.measured = max_z;
  rep.bound = 3.0;
  rep.pass = violations == 0;
  rep.detail = "max |mean-target|/SE over " + std::to_string(p * p) + " entries, " +
               std::to_string(replications) + " replications; violations=" +
               std::to_string(violations);
  return rep;
}

CheckReport check_projection_oracle(int instances, std::uint64_t seed) {
  if (instances < 1) throw std::invalid_argument("check_projection_oracle: instances must be >= 1");
  Rng rng(seed);
  double worst_match = 0.0;
  double worst_trace = 0.0;
  double worst_spectrum = 0.0;
  double worst_idem = 0.0;
  for (int k = 0; k < instances; ++k) {
    const Mat a = random_symmetric(3, 2.0, rng);
    const Mat proj = project_fantope(a);
    const Mat ref = project_fantope_reference(a);
    worst_match = std::max(worst_match, fro_diff(proj, ref));
    worst_trace = std::max(worst_trace, std::abs(trace(proj) - 1.0));
    const linalg::SymEig eig = linalg::eig_sym(proj);
    worst_spectrum = std::max({worst_spectrum, -eig.values.front(), eig.values.back() - 1.0});
    worst_idem = std::max(worst_idem, fro_diff(project_fantope(proj), proj));
  }
  worst_spectrum = std::max(worst_spectrum, 0.0);

  CheckReport rep;
  rep.name = "fantope_projection_oracle";
  rep.measured = worst_match;
  rep.bound = 1e-8;
  rep.pass = worst_match <= 1e-8 && worst_trace <= 1e-10 && worst_spectrum <= 1e-10 &&
             worst_idem <= 1e-10;
  rep.detail = std::to_string(instances) + " random 3x3; vs exact-breakpoint oracle " +
               fmt(worst_match) + ", |trace-1| " + fmt(worst_trace) + ", spectrum excess " +
               fmt(worst_spectrum) + ", idempotence " + fmt(worst_idem);
  return rep;
}

CheckReport check_sdp_grid_oracle(std::uint64_t seed) {
  // Part A: mu = 0 on a spiked matrix has the analytic solution u1 u1'.
  const SpikedModel model = make_spiked_model(20, 2.0);
  Vec u1 = model.beta0;
  const double inv = 1.0 / l2_norm(u1);
  for (double& v : u1) v *= inv;
  FantopeProblem prob;
  prob.sigma.matrix = model.sigma0;
  prob.mu = 0.0;
  const FantopeSolution sol = solve_fantope(prob);
  const double spike_err = fro_diff(sol.f, outer(u1));

  // Part B: 2x2 instances against the dense grid search.
  Rng rng(seed);
  double worst_gap = 0.0;
  for (double mu : {0.05, 0.2}) {
    for (int k = 0; k < 20; ++k) {
      FantopeProblem small;
      small.sigma.matrix = random_symmetric(2, 1.5, rng);
      small.mu = mu;
      const FantopeSolution s = solve_fantope(small);
      const double grid = fantope2x2_grid_min(small.sigma.matrix, mu);
      worst_gap = std::max(worst_gap, std::abs(s.objective - grid));
    }
  }

  CheckReport rep;
  rep.name = "sdp_grid_oracle";
  rep.measured = worst_gap;
  rep.bound = 1e-5;
  rep.pass = worst_gap <= 1e-5 && spike_err <= 1e-3;
  rep.detail = "40 random 2x2 at mu in {0.05, 0.2}: worst |objective - grid| " + fmt(worst_gap) +
               "; spiked p=20 mu=0 recovery error " + fmt(spike_err) + " (bound 1e-3)";
  return rep;
}

CheckReport check_gradient_oracle(int instances, std::uint64_t seed) {
  if (instances < 1) throw std::invalid_argument("check_gradient_oracle: instances must be >= 1");
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const std::size_t p = 3 + static_cast<std::size_t>(k % 8);
    CorrectedCovariance cov;
    cov.matrix = random_symmetric(p, 1.0, rng);
    Vec beta(p);
    for (double& b : beta) b = rng.uniform(-1.5, 1.5);
    const Vec grad = risk_gradient(cov, beta);
    const Vec fd = fd_risk_gradient(cov.matrix, beta, 1e-5);
    double diff2 = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double d = grad[i] - fd[i];
      diff2 += d * d;
      norm2 += grad[i] * grad[i];
    }
    const double rel = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-12);
    worst = std::max(worst, rel);
  }

  CheckReport rep;
  rep.name = "risk_gradient_fd_oracle";
  rep.measured = worst;
  rep.bound = 1e-6;
  rep.pass = worst < 1e-6;
  rep.detail = std::to_string(instances) + " random instances, p in {3..10}, h=1e-5";
  return rep;
}

std::vector<CheckReport> run_selfcheck() {
  std::vector<CheckReport> out;

  const auto matching_fn = [](const ScenarioConfig& config) {
    const CorrectionSpec spec = matching_correction(config);
    return CorrectionFn(
        [spec](const ObservedData& data) { return apply_correction(data, spec); });
  };

  {
    ScenarioConfig config;
    config.scenario = Scenario::uniform_missing;
    config.n = 5000;
    config.model = make_spiked_model(5, 1.0);
    config.delta = 0.7;
    out.push_back(check_unbiasedness(config, 200, 101, matching_fn(config)));
  }
  {
    ScenarioConfig config;
    config.scenario = Scenario::multiplicative;
    config.n = 5000;
    config.model = make_spiked_model(5, 1.0);
    config.noise.family = NoiseFamily::uniform;
    config.noise.lo = 0.5;
    config.noise.hi = 1.5;
    out.push_back(check_unbiasedness(config, 200, 102, matching_fn(config)));
  }
  {
    ScenarioConfig config;
    config.scenario = Scenario::nonuniform_missing;
    config.n = 5000;
    config.model = make_spiked_model(5, 1.0);
    config.delta_vec = {0.6, 0.65, 0.7, 0.75, 0.8};
    out.push_back(check_unbiasedness(config, 200, 103, matching_fn(config)));
  }
  {
    ScenarioConfig config;
    config.scenario = Scenario::lowrank_additive_missing;
    config.n = 5000;
    config.model = make_spiked_model(5, 0.0);
    config.delta = 0.8;
    config.d1 = 2.0;
    config.sigma_noise = 0.5;
    out.push_back(check_unbiasedness(config, 200, 104, matching_fn(config)));
  }

  out.push_back(check_projection_oracle(100, 201));
  out.push_back(check_sdp_grid_oracle(202));
  out.push_back(check_gradient_oracle(100, 203));
  return out;
}

}  // namespace speco::checks
