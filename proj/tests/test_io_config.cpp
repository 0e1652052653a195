#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "speco/config.hpp"
#include "speco/io.hpp"
#include "speco/rng.hpp"
#include "speco/simulate.hpp"

using speco::Config;
using speco::ConfigError;
using speco::IoError;
using speco::Mat;
using speco::MatrixFile;
using speco::ResultRow;
using speco::Vec;

namespace {

std::string temp_path(const std::string& name) {
  static const std::string dir = [] {
    const auto d = std::filesystem::temp_directory_path() / "speco_io_tests";
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir + "/" + name;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("doubles survive a serialization round trip bit for bit") {
  const std::vector<double> values = {0.0,
                                      1.0,
                                      -1.0,
                                      1.0 / 3.0,
                                      std::sqrt(2.0),
                                      6.02214076e23,
                                      -2.5e-8,
                                      123456789.123456789,
                                      1e-300,
                                      std::numeric_limits<double>::max()};
  for (double v : values) {
    const std::string s = speco::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("matrix csv round trip preserves values, mask, and layout") {
  speco::Rng rng(801);
  Mat values(5, 4);
  Mat mask(5, 4, 1.0);
  for (std::size_t i = 0; i < values.size(); ++i) values.data()[i] = rng.normal();
  mask(0, 1) = 0.0;
  mask(3, 2) = 0.0;
  values(0, 1) = 0.0;  // masked entries are stored zero-filled
  values(3, 2) = 0.0;

  const std::string path = temp_path("roundtrip.csv");
  speco::write_matrix_csv(path, values, &mask);

  const std::string text = speco::read_text_file(path);
  CHECK(contains(text, "j0,j1,j2,j3"));

  const MatrixFile back = speco::read_matrix_csv(path);
  REQUIRE(back.values.rows() == 5);
  REQUIRE(back.values.cols() == 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(back.values.data()[i] == values.data()[i]);
    CHECK(back.mask.data()[i] == mask.data()[i]);
  }
  CHECK(back.observed_fraction == doctest::Approx(18.0 / 20.0).epsilon(1e-15));
}

TEST_CASE("reader accepts empty cells and nan tokens as missing") {
  const std::string path = temp_path("missing.csv");
  speco::write_text_file(path, "j0,j1\n1.5,\nNaN,2.0\nnan,NAN\n");
  const MatrixFile f = speco::read_matrix_csv(path);
  REQUIRE(f.values.rows() == 3);
  CHECK(f.values(0, 0) == 1.5);
  CHECK(f.values(0, 1) == 0.0);
  CHECK(f.mask(0, 0) == 1.0);
  CHECK(f.mask(0, 1) == 0.0);
  CHECK(f.mask(1, 0) == 0.0);
  CHECK(f.values(1, 1) == 2.0);
  CHECK(f.mask(2, 0) == 0.0);
  CHECK(f.mask(2, 1) == 0.0);
  CHECK(f.observed_fraction == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("reader failures carry the path and line number") {
  CHECK_THROWS_WITH_AS(speco::read_matrix_csv(temp_path("absent.csv")),
                       doctest::Contains("absent.csv"), IoError);

  const std::string bad_cell = temp_path("badcell.csv");
  speco::write_text_file(bad_cell, "j0,j1\n1.0,fish\n");
  CHECK_THROWS_WITH_AS(speco::read_matrix_csv(bad_cell), doctest::Contains(":2"), IoError);

  const std::string ragged = temp_path("ragged.csv");
  speco::write_text_file(ragged, "j0,j1\n1.0,2.0,3.0\n");
  CHECK_THROWS_WITH_AS(speco::read_matrix_csv(ragged), doctest::Contains("expected 2 columns"),
                       IoError);

  const std::string empty = temp_path("empty.csv");
  speco::write_text_file(empty, "");
  CHECK_THROWS_AS(speco::read_matrix_csv(empty), IoError);

  const std::string header_only = temp_path("header_only.csv");
  speco::write_text_file(header_only, "j0,j1\n");
  CHECK_THROWS_WITH_AS(speco::read_matrix_csv(header_only), doctest::Contains("no data rows"),
                       IoError);
}

TEST_CASE("result csv has the exact column schema") {
  ResultRow row;
  row.scenario = "uniform_missing";
  row.omega = 1.5;
  row.delta_label = "0.7";
  row.replication_index = 3;
  row.estimator_name = "sdp_corrected";
  row.error = 0.25;
  row.iterations = 42;
  row.runtime_ms = 12.5;
  row.seed = 987654321;

  ResultRow failed = row;
  failed.estimator_name = "refined";
  failed.error = std::numeric_limits<double>::quiet_NaN();
  failed.iterations = -1;

  const std::string path = temp_path("rows.csv");
  speco::write_result_csv(path, {row, failed});
  const std::string text = speco::read_text_file(path);
  CHECK(contains(text,
                 "scenario,omega,delta_label,replication_index,estimator_name,error,"
                 "iterations,runtime_ms,seed"));
  CHECK(contains(text, "uniform_missing,1.5,0.7,3,sdp_corrected,0.25,42,12.5,987654321"));
  CHECK(contains(text, "nan"));
  CHECK(contains(text, ",-1,"));
}

TEST_CASE("config parses sections, comments, and typed lookups") {
  const Config cfg = Config::from_string("# full-line hash comment\n"
                                         "[scenario]\n"
                                         "kind = uniform_missing\n"
                                         "; full-line semicolon comment\n"
                                         "n = 100\n"
                                         "delta = 0.7\n"
                                         "\n"
                                         "[solver]\n"
                                         "q_bound = inf\n"
                                         "weights = 0.6, 0.8, 1.0\n",
                                         "inline");
  CHECK(cfg.has("scenario", "n"));
  CHECK(!cfg.has("scenario", "missing"));
  CHECK(cfg.get_int("scenario", "n", 0) == 100);
  CHECK(cfg.get_double("scenario", "delta", 0.0) == 0.7);
  CHECK(cfg.get_string("scenario", "absent", "dflt") == "dflt");
  CHECK(std::isinf(cfg.require_double("solver", "q_bound")));
  CHECK(cfg.get_double_list("solver", "weights") == Vec{0.6, 0.8, 1.0});
  CHECK(cfg.get_double_list("solver", "no_such_list").empty());
  CHECK(cfg.get_string("scenario", "kind", "") == "uniform_missing");
}

TEST_CASE("config errors identify the offending entry") {
  CHECK_THROWS_WITH_AS(Config::from_string("key = 1\n", "inline"),
                       doctest::Contains("outside any [section]"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::from_string("[a]\nk = 1\nk = 2\n", "inline"),
                       doctest::Contains("duplicate key"), ConfigError);

  const Config cfg = Config::from_string("[s]\nx = pear\n", "inline");
  CHECK_THROWS_WITH_AS(cfg.require_double("s", "x"), doctest::Contains("pear"), ConfigError);
  CHECK_THROWS_WITH_AS(cfg.require_double("s", "y"), doctest::Contains("missing required key"),
                       ConfigError);

  const Config unused = Config::from_string("[solver]\nrho = 1.0\ntypo_key = 3\n", "inline");
  (void)unused.get_double("solver", "rho", 0.0);
  CHECK_THROWS_WITH_AS(unused.ensure_all_used(), doctest::Contains("typo_key"), ConfigError);
}

TEST_CASE("scenario and solver builders consume their sections") {
  const Config cfg = Config::from_string("[scenario]\n"
                                         "kind = uniform_missing\n"
                                         "n = 50\n"
                                         "p = 10\n"
                                         "omega = 1.2\n"
                                         "delta = 0.8\n"
                                         "[solver]\n"
                                         "mu_scale = 2.0\n"
                                         "rho = 3.0\n"
                                         "lambda = 0.05\n"
                                         "q_bound = inf\n",
                                         "inline");
  const speco::ScenarioConfig sc = speco::scenario_from_config(cfg);
  CHECK(sc.scenario == speco::Scenario::uniform_missing);
  CHECK(sc.n == 50);
  CHECK(sc.model.p == 10);
  CHECK(sc.model.omega == 1.2);
  CHECK(sc.delta == 0.8);

  const speco::SolverSettings sv = speco::solver_from_config(cfg);
  CHECK(sv.mu_scale == 2.0);
  CHECK(sv.rho == 3.0);
  REQUIRE(sv.lambda.has_value());
  CHECK(*sv.lambda == 0.05);
  CHECK(std::isinf(sv.q_bound));
  CHECK(!sv.mu.has_value());

  cfg.ensure_all_used();
}

TEST_CASE("sweep builder expands the grid with solver overrides") {
  const Config cfg = Config::from_string("[sweep]\n"
                                         "scenario = uniform_missing\n"
                                         "n = 30\n"
                                         "p = 8\n"
                                         "omega_list = 0.5, 1.0\n"
                                         "delta_list = 0.7, 1.0\n"
                                         "replications = 2\n"
                                         "base_seed = 99\n"
                                         "estimators = pca_oracle_data, refined\n"
                                         "[solver]\n"
                                         "rho = 2.5\n",
                                         "inline");
  const speco::SweepPlan plan = speco::sweep_from_config(cfg);
  cfg.ensure_all_used();
  CHECK(plan.cells.size() == 4);
  CHECK(plan.replications == 2);
  CHECK(plan.base_seed == 99);
  REQUIRE(plan.estimators.size() == 2);
  CHECK(plan.estimators[0] == speco::EstimatorKind::pca_oracle_data);
  CHECK(plan.estimators[1] == speco::EstimatorKind::refined);
  CHECK(plan.solver.rho == 2.5);
  CHECK(plan.cells[0].delta_label == "0.7");
  CHECK(plan.cells[0].config.model.omega == 0.5);
  CHECK(plan.cells[1].config.model.omega == 1.0);

  CHECK_THROWS_WITH_AS(
      speco::sweep_from_config(Config::from_string("[sweep]\n"
                                                   "scenario = uniform_missing\n"
                                                   "n = 30\n"
                                                   "p = 8\n"
                                                   "omega_list = 1.0\n"
                                                   "delta_list = 0.7\n"
                                                   "replications = 1\n"
                                                   "estimators = wat\n",
                                                   "inline")),
      doctest::Contains("estimators"), ConfigError);
}

TEST_CASE("correction builder covers every variant") {
  const Config uni = Config::from_string("[correction]\nkind = uniform_missing\ndelta = 0.6\n",
                                         "inline");
  const speco::CorrectionSpec su = speco::correction_from_config(uni, 5);
  CHECK(su.variant == speco::CorrectionKind::uniform_missing);
  CHECK(su.delta == 0.6);

  const Config none = Config::from_string("[correction]\nkind = none\n", "inline");
  CHECK(speco::correction_from_config(none, 5).variant == speco::CorrectionKind::none);

  const Config bad = Config::from_string("[correction]\nkind = uniform_missing\ndelta = 0\n",
                                         "inline");
  CHECK_THROWS_AS(speco::correction_from_config(bad, 5), ConfigError);
}

TEST_CASE("evenly spaced observation profiles clamp at one and stay positive") {
  const Vec v = speco::delta_profile(4, 0.7, 0.2);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(v[3] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.6 + 0.2 / 3.0).epsilon(1e-12));

  const Vec clamped = speco::delta_profile(3, 0.95, 0.2);
  CHECK(clamped[2] == 1.0);
  CHECK(clamped[0] == doctest::Approx(0.85).epsilon(1e-12));

  const Vec flat = speco::delta_profile(3, 0.5, 0.0);
  for (double d : flat) CHECK(d == 0.5);

  CHECK_THROWS_AS(speco::delta_profile(4, 0.05, 0.2), std::invalid_argument);
}
