#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "speco/checks.hpp"
#include "speco/config.hpp"
#include "speco/correction.hpp"
#include "speco/io.hpp"
#include "speco/kernels.hpp"
#include "speco/pipeline.hpp"
#include "speco/simulate.hpp"

namespace {

using nlohmann::json;
using namespace speco;

json vec_to_json(const Vec& v) { return json(v); }

json scenario_meta(const ScenarioConfig& config) {
  json meta;
  meta["scenario"] = to_string(config.scenario);
  meta["n"] = config.n;
  meta["p"] = config.model.p;
  meta["omega"] = config.model.omega;
  meta["beta0"] = vec_to_json(config.model.beta0);
  switch (config.scenario) {
    case Scenario::full:
      break;
    case Scenario::uniform_missing:
      meta["delta"] = config.delta;
      break;
    case Scenario::multiplicative:
      meta["noise_family"] =
          config.noise.family == NoiseFamily::bernoulli ? "bernoulli" : "uniform";
      if (config.noise.family == NoiseFamily::bernoulli) {
        meta["noise_delta"] = config.noise.delta;
      } else {
        meta["noise_lo"] = config.noise.lo;
        meta["noise_hi"] = config.noise.hi;
      }
      break;
    case Scenario::nonuniform_missing:
      meta["delta_vec"] = vec_to_json(config.delta_vec);
      break;
    case Scenario::lowrank_additive_missing:
      meta["delta"] = config.delta;
      meta["d1"] = config.d1;
      meta["sigma_noise"] = config.sigma_noise;
      break;
  }
  return meta;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::uint64_t seed) {
  const Config cfg = Config::from_file(config_path);
  const ScenarioConfig scenario = scenario_from_config(cfg);
  cfg.ensure_all_used();

  const Dataset ds = generate(scenario, seed);

  json meta = scenario_meta(scenario);
  meta["kind"] = "simulation";
  meta["seed"] = seed;
  meta["observed_fraction"] = ds.observed_fraction;
  meta["ground_truth"] = vec_to_json(ds.ground_truth);

  write_matrix_csv(out_path, ds.data.values, &ds.mask);
  write_text_file(out_path + ".meta.json", meta.dump(2) + "\n");
  std::cerr << "wrote " << ds.data.n_rows() << "x" << ds.data.n_cols() << " matrix to "
            << out_path << " (observed fraction " << ds.observed_fraction << ")\n";
  return 0;
}

std::optional<Vec> sidecar_ground_truth(const std::string& data_path) {
  const std::string meta_path = data_path + ".meta.json";
  if (!std::filesystem::exists(meta_path)) return std::nullopt;
  json meta;
  try {
    meta = json::parse(read_text_file(meta_path));
  } catch (const json::exception& e) {
    throw IoError("malformed metadata sidecar " + meta_path + ": " + e.what());
  }
  if (!meta.contains("ground_truth")) return std::nullopt;
  try {
    return meta["ground_truth"].get<Vec>();
  } catch (const json::exception& e) {
    throw IoError("malformed ground_truth in " + meta_path + ": " + e.what());
  }
}

json correction_to_json(const CorrectionSpec& spec) {
  json j;
  j["kind"] = to_string(spec.variant);
  switch (spec.variant) {
    case CorrectionKind::none:
      break;
    case CorrectionKind::uniform_missing:
      j["delta"] = spec.delta;
      break;
    case CorrectionKind::multiplicative:
      j["m_diag"] = spec.m.rows() ? spec.m(0, 0) : 0.0;
      j["m_offdiag"] = spec.m.rows() > 1 ? spec.m(0, 1) : 0.0;
      break;
    case CorrectionKind::nonuniform:
      j["delta_vec"] = vec_to_json(spec.delta_vec);
      break;
    case CorrectionKind::lowrank:
      j["delta"] = spec.delta;
      j["sigma_w_diag"] = spec.sigma_w.rows() ? spec.sigma_w(0, 0) : 0.0;
      break;
  }
  return j;
}

int cmd_estimate(const std::string& data_path, const std::string& config_path,
                 const std::string& out_path, bool strict, bool skip_refine,
                 const std::string& format) {
  if (format != "json")
    throw ConfigError("estimate reports support --format json only, got '" + format + "'");

  const MatrixFile file = read_matrix_csv(data_path);
  std::cerr << "read " << file.values.rows() << "x" << file.values.cols() << " matrix from "
            << data_path << " (observed fraction " << file.observed_fraction << ")\n";

  const Config cfg = Config::from_file(config_path);
  const CorrectionSpec correction = correction_from_config(cfg, file.values.cols());
  const SolverSettings solver = solver_from_config(cfg);
  cfg.ensure_all_used();

  ObservedData data{file.values, Scenario::full};
  validate(data);

  const PipelineResult res = run_pipeline(data, correction, solver, !skip_refine);
  const std::optional<Vec> truth = sidecar_ground_truth(data_path);

  json report;
  report["kind"] = "estimate_report";
  report["data"] = {{"path", data_path},
                    {"rows", file.values.rows()},
                    {"cols", file.values.cols()},
                    {"observed_fraction", file.observed_fraction}};
  report["correction"] = correction_to_json(correction);
  report["sigma"] = {{"min_eigenvalue", res.sigma.min_eigenvalue_hint.value_or(0.0)},
                     {"max_eigenvalue", res.max_eigenvalue_hint.value_or(0.0)}};
  report["sdp"] = {{"mu", res.mu_used},
                   {"rho", solver.rho},
                   {"iterations", res.sdp.iterations},
                   {"primal_residual", res.sdp.primal_residual},
                   {"dual_residual", res.sdp.dual_residual},
                   {"objective", res.sdp.objective},
                   {"converged", res.sdp.converged}};
  report["init"] = {{"trace_value", res.init.trace_value},
                    {"degenerate", res.init.degenerate},
                    {"u1", vec_to_json(res.init.u1)},
                    {"beta_init", vec_to_json(res.init.beta_init)}};
  if (truth) report["init"]["error"] = estimation_error(
      res.degenerate_fallback ? res.init.u1 : res.init.beta_init, *truth);

  bool all_converged = res.sdp.converged;
  if (res.refined) {
    const RefinedEstimate& r = *res.refined;
    std::size_t support = 0;
    for (double v : r.beta)
      if (std::abs(v) > 1e-6) ++support;
    report["refined"] = {{"lambda", res.lambda_used},
                         {"iterations", r.iterations},
                         {"stationarity_gap", r.stationarity_gap},
                         {"objective", r.objective},
                         {"converged", r.converged},
                         {"l1_active", r.l1_active},
                         {"l2_active", r.l2_active},
                         {"support_size", support},
                         {"beta", vec_to_json(r.beta)}};
    // A large penalty can drive the refined vector to exactly zero, which has
    // no direction to compare against; the report then omits the error field.
    if (truth && l2_norm(r.beta) > 0.0)
      report["refined"]["error"] = estimation_error(r.beta, *truth);
    all_converged = all_converged && r.converged;
  } else {
    report["refined"] = nullptr;
  }
  report["beta_hat"] = vec_to_json(res.beta_hat);
  report["degenerate_fallback"] = res.degenerate_fallback;

  write_text_file(out_path, report.dump(2) + "\n");
  if (strict && !all_converged) {
    std::cerr << "solver did not converge (strict mode): report written to " << out_path << "\n";
    return 4;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path, int threads,
              std::optional<std::uint64_t> seed_override, const std::string& format) {
  if (format != "csv" && format != "json")
    throw ConfigError("sweep output supports --format csv or json, got '" + format + "'");

  const Config cfg = Config::from_file(config_path);
  SweepPlan plan = sweep_from_config(cfg);
  cfg.ensure_all_used();
  if (threads < 1) throw ConfigError("--threads must be >= 1");
  plan.threads = threads;
  if (seed_override) plan.base_seed = *seed_override;

  const std::vector<ResultRow> rows = run_sweep(plan);

  std::size_t failures = 0;
  for (const ResultRow& r : rows)
    if (!r.failure.empty()) {
      ++failures;
      std::cerr << "estimator failure [" << r.scenario << " omega=" << r.omega
                << " delta=" << r.delta_label << " rep=" << r.replication_index << " "
                << r.estimator_name << "]: " << r.failure << "\n";
    }

  if (format == "csv") {
    write_result_csv(out_path, rows);
  } else {
    json arr = json::array();
    for (const ResultRow& r : rows) {
      arr.push_back({{"scenario", r.scenario},
                     {"omega", r.omega},
                     {"delta_label", r.delta_label},
                     {"replication_index", r.replication_index},
                     {"estimator_name", r.estimator_name},
                     {"error", r.error},
                     {"iterations", r.iterations},
                     {"runtime_ms", r.runtime_ms},
                     {"seed", r.seed}});
    }
    write_text_file(out_path, arr.dump(2) + "\n");
  }
  std::cerr << "wrote " << rows.size() << " result rows to " << out_path << " (" << failures
            << " failures)\n";
  return 0;
}

int cmd_selfcheck() {
  std::cout << "kernels: " << kernels::ops().name << "\n";
  const std::vector<checks::CheckReport> reports = checks::run_selfcheck();
  bool all_pass = true;
  for (const checks::CheckReport& r : reports) {
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": measured " << r.measured
              << " (bound " << r.bound << ") - " << r.detail << "\n";
  }
  std::cout << (all_pass ? "selfcheck: all oracles passed\n"
                         : "selfcheck: ORACLE FAILURES PRESENT\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse leading-eigenvector estimation under missing and corrupted data"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string data_path;
  std::uint64_t seed = 1;
  bool strict = false;
  bool skip_refine = false;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool seed_given = false;
  std::string est_format = "json";
  std::string swp_format = "csv";

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim->add_option("--config", config_path, "scenario config file")->required();
  sim->add_option("--out", out_path, "output CSV path (sidecar <out>.meta.json)")->required();
  sim->add_option("--seed", seed, "RNG seed");

  CLI::App* est = app.add_subcommand("estimate", "run the estimation pipeline on a data file");
  est->add_option("data", data_path, "input matrix CSV")->required();
  est->add_option("--config", config_path, "correction/solver config file")->required();
  est->add_option("--out", out_path, "output report path")->required();
  est->add_flag("--strict", strict, "exit 4 when any solver fails to converge");
  est->add_flag("--skip-refine", skip_refine, "stop after the spectral initializer");
  est->add_option("--format", est_format, "report format (json)");

  CLI::App* swp = app.add_subcommand("sweep", "run a replication sweep over a parameter grid");
  swp->add_option("--config", config_path, "sweep config file")->required();
  swp->add_option("--out", out_path, "output results path")->required();
  swp->add_option("--threads", threads, "worker threads");
  swp->add_option("--seed", seed, "override [sweep] base_seed")->each([&](const std::string&) {
    seed_given = true;
  });
  swp->add_option("--format", swp_format, "results format (csv|json)");

  CLI::App* chk = app.add_subcommand("selfcheck", "run the numerical oracle suite");
  (void)chk;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_path, seed);
    if (est->parsed())
      return cmd_estimate(data_path, config_path, out_path, strict, skip_refine, est_format);
    if (swp->parsed())
      return cmd_sweep(config_path, out_path, threads,
                       seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt, swp_format);
    if (chk->parsed()) return cmd_selfcheck();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
