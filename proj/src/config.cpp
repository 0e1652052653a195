#include "speco/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

namespace speco {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

double parse_double_token(const std::string& token, const std::string& where) {
  const std::string t = trim(token);
  if (t.empty()) throw ConfigError(where + ": empty numeric value");
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError(where + ": cannot parse '" + t + "' as a number");
  return v;
}

long long parse_int_token(const std::string& token, const std::string& where) {
  const std::string t = trim(token);
  if (t.empty()) throw ConfigError(where + ": empty integer value");
  const char* begin = t.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ConfigError(where + ": cannot parse '" + t + "' as an integer");
  return v;
}

std::string format_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  return from_string(read_text_file(path), path);
}

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::string section;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any [section]");
    auto& sec = cfg.sections_[section];
    if (sec.count(key))
      throw ConfigError(where + ": duplicate key '" + key + "' in [" + section + "]");
    sec[key] = Entry{value, line_no, false};
  }
  return cfg;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return nullptr;
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

void Config::fail(const std::string& section, const std::string& key, const Entry& entry,
                  const std::string& why) const {
  throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": [" + section + "] " + key +
                    ": " + why);
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

std::string Config::require_string(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
  return e->value;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  try {
    return parse_double_token(e->value, "");
  } catch (const ConfigError&) {
    fail(section, key, *e, "cannot parse '" + e->value + "' as a number");
  }
}

double Config::require_double(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
  try {
    return parse_double_token(e->value, "");
  } catch (const ConfigError&) {
    fail(section, key, *e, "cannot parse '" + e->value + "' as a number");
  }
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  try {
    return parse_int_token(e->value, "");
  } catch (const ConfigError&) {
    fail(section, key, *e, "cannot parse '" + e->value + "' as an integer");
  }
}

Vec Config::get_double_list(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return {};
  Vec out;
  for (const std::string& token : split_list(e->value)) {
    try {
      out.push_back(parse_double_token(token, ""));
    } catch (const ConfigError&) {
      fail(section, key, *e, "cannot parse list entry '" + token + "' as a number");
    }
  }
  return out;
}

void Config::ensure_all_used() const {
  for (const auto& [section, entries] : sections_)
    for (const auto& [key, entry] : entries)
      if (!entry.used)
        throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                          "' in [" + section + "]");
}

Vec delta_profile(std::size_t p, double center, double spread) {
  if (p < 1) throw std::invalid_argument("delta_profile: p must be >= 1");
  if (spread < 0.0) throw std::invalid_argument("delta_profile: spread must be nonnegative");
  const double lo = center - 0.5 * spread;
  if (!(lo > 0.0))
    throw std::invalid_argument("delta_profile: low end of the profile must stay positive");
  Vec out(p, center);
  if (p == 1 || spread == 0.0) {
    for (double& v : out) v = std::min(v, 1.0);
    return out;
  }
  for (std::size_t j = 0; j < p; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(p - 1);
    out[j] = std::min(lo + spread * frac, 1.0);
  }
  return out;
}

namespace {

NoiseSpec noise_from_section(const Config& cfg, const std::string& section) {
  NoiseSpec noise;
  const std::string family = cfg.get_string(section, "noise_family", "bernoulli");
  if (family == "bernoulli") {
    noise.family = NoiseFamily::bernoulli;
    noise.delta = cfg.require_double(section, "noise_delta");
  } else if (family == "uniform") {
    noise.family = NoiseFamily::uniform;
    noise.lo = cfg.require_double(section, "noise_lo");
    noise.hi = cfg.require_double(section, "noise_hi");
  } else {
    throw ConfigError("[" + section + "] noise_family: expected 'bernoulli' or 'uniform', got '" +
                      family + "'");
  }
  return noise;
}

[[noreturn]] void rethrow_as_config(const std::string& context, const std::exception& e) {
  throw ConfigError(context + ": " + e.what());
}

}  // namespace

ScenarioConfig scenario_from_config(const Config& cfg) {
  ScenarioConfig out;
  const std::string kind = cfg.require_string("scenario", "kind");
  try {
    out.scenario = scenario_from_string(kind);
  } catch (const std::exception& e) {
    rethrow_as_config("[scenario] kind", e);
  }
  const long long n = cfg.get_int("scenario", "n", 0);
  const long long p = cfg.get_int("scenario", "p", 0);
  if (n < 1) throw ConfigError("[scenario] n: must be >= 1");
  if (p < 2) throw ConfigError("[scenario] p: must be >= 2");
  out.n = static_cast<std::size_t>(n);
  const double omega = cfg.get_double("scenario", "omega", 0.0);
  if (omega < 0.0) throw ConfigError("[scenario] omega: must be nonnegative");
  const Vec beta0 = cfg.get_double_list("scenario", "beta0");
  try {
    out.model = beta0.empty()
                    ? make_spiked_model(static_cast<std::size_t>(p), omega)
                    : make_spiked_model(static_cast<std::size_t>(p), omega, beta0);
  } catch (const std::exception& e) {
    rethrow_as_config("[scenario] model", e);
  }

  switch (out.scenario) {
    case Scenario::full:
      break;
    case Scenario::uniform_missing:
      out.delta = cfg.require_double("scenario", "delta");
      break;
    case Scenario::multiplicative:
      out.noise = noise_from_section(cfg, "scenario");
      break;
    case Scenario::nonuniform_missing: {
      out.delta_vec = cfg.get_double_list("scenario", "delta_vec");
      if (out.delta_vec.empty()) {
        const double center = cfg.require_double("scenario", "delta");
        const double spread = cfg.get_double("scenario", "delta_spread", 0.2);
        try {
          out.delta_vec = delta_profile(out.model.p, center, spread);
        } catch (const std::exception& e) {
          rethrow_as_config("[scenario] delta profile", e);
        }
      }
      break;
    }
    case Scenario::lowrank_additive_missing:
      out.delta = cfg.require_double("scenario", "delta");
      out.d1 = cfg.get_double("scenario", "d1", out.d1);
      out.sigma_noise = cfg.get_double("scenario", "sigma_noise", out.sigma_noise);
      break;
  }
  try {
    validate_scenario(out);
  } catch (const std::exception& e) {
    rethrow_as_config("[scenario]", e);
  }
  return out;
}

SolverSettings solver_from_config(const Config& cfg) {
  SolverSettings out;
  if (cfg.has("solver", "mu")) out.mu = cfg.require_double("solver", "mu");
  out.mu_scale = cfg.get_double("solver", "mu_scale", out.mu_scale);
  out.rho = cfg.get_double("solver", "rho", out.rho);
  out.sdp_max_iter = static_cast<int>(cfg.get_int("solver", "sdp_max_iter", out.sdp_max_iter));
  out.tol_abs = cfg.get_double("solver", "tol_abs", out.tol_abs);
  out.tol_rel = cfg.get_double("solver", "tol_rel", out.tol_rel);
  if (cfg.has("solver", "lambda")) out.lambda = cfg.require_double("solver", "lambda");
  out.lambda_scale = cfg.get_double("solver", "lambda_scale", out.lambda_scale);
  out.q_bound = cfg.get_double("solver", "q_bound", out.q_bound);
  out.ball_radius = cfg.get_double("solver", "ball_radius", out.ball_radius);
  out.refine_max_iter =
      static_cast<int>(cfg.get_int("solver", "refine_max_iter", out.refine_max_iter));
  out.stat_tol = cfg.get_double("solver", "stat_tol", out.stat_tol);
  out.step_shrink = cfg.get_double("solver", "step_shrink", out.step_shrink);
  out.initial_step = cfg.get_double("solver", "initial_step", out.initial_step);

  if (out.mu && *out.mu < 0.0) throw ConfigError("[solver] mu: must be nonnegative");
  if (out.mu_scale < 0.0) throw ConfigError("[solver] mu_scale: must be nonnegative");
  if (!(out.rho > 0.0)) throw ConfigError("[solver] rho: must be positive");
  if (out.sdp_max_iter < 1) throw ConfigError("[solver] sdp_max_iter: must be >= 1");
  if (!(out.tol_abs > 0.0) || !(out.tol_rel > 0.0))
    throw ConfigError("[solver] tolerances must be positive");
  if (out.lambda && *out.lambda < 0.0) throw ConfigError("[solver] lambda: must be nonnegative");
  if (out.lambda_scale < 0.0) throw ConfigError("[solver] lambda_scale: must be nonnegative");
  if (!(out.q_bound > 0.0)) throw ConfigError("[solver] q_bound: must be positive");
  if (!(out.ball_radius > 0.0)) throw ConfigError("[solver] ball_radius: must be positive");
  if (out.refine_max_iter < 1) throw ConfigError("[solver] refine_max_iter: must be >= 1");
  if (!(out.stat_tol > 0.0)) throw ConfigError("[solver] stat_tol: must be positive");
  if (!(out.step_shrink > 0.0 && out.step_shrink < 1.0))
    throw ConfigError("[solver] step_shrink: must lie in (0,1)");
  return out;
}

CorrectionSpec correction_from_config(const Config& cfg, std::size_t p) {
  CorrectionSpec spec;
  const std::string kind = cfg.require_string("correction", "kind");
  try {
    spec.variant = correction_kind_from_string(kind);
  } catch (const std::exception& e) {
    rethrow_as_config("[correction] kind", e);
  }
  switch (spec.variant) {
    case CorrectionKind::none:
      break;
    case CorrectionKind::uniform_missing:
      spec.delta = cfg.require_double("correction", "delta");
      if (!(spec.delta > 0.0 && spec.delta <= 1.0))
        throw ConfigError("[correction] delta: must lie in (0,1]");
      break;
    case CorrectionKind::multiplicative: {
      const NoiseSpec noise = noise_from_section(cfg, "correction");
      try {
        spec.m = analytic_m(noise, p);
      } catch (const std::exception& e) {
        rethrow_as_config("[correction] noise moments", e);
      }
      break;
    }
    case CorrectionKind::nonuniform: {
      spec.delta_vec = cfg.get_double_list("correction", "delta_vec");
      if (spec.delta_vec.empty()) {
        const double center = cfg.require_double("correction", "delta");
        const double spread = cfg.get_double("correction", "delta_spread", 0.2);
        try {
          spec.delta_vec = delta_profile(p, center, spread);
        } catch (const std::exception& e) {
          rethrow_as_config("[correction] delta profile", e);
        }
      }
      if (spec.delta_vec.size() != p)
        throw ConfigError("[correction] delta_vec: expected one entry per variable (p = " +
                          std::to_string(p) + ")");
      for (double d : spec.delta_vec)
        if (!(d > 0.0 && d <= 1.0))
          throw ConfigError("[correction] delta_vec: entries must lie in (0,1]");
      break;
    }
    case CorrectionKind::lowrank: {
      spec.scale = GramScale::raw_gram;
      spec.delta = cfg.require_double("correction", "delta");
      if (!(spec.delta > 0.0 && spec.delta <= 1.0))
        throw ConfigError("[correction] delta: must lie in (0,1]");
      const double w = cfg.require_double("correction", "sigma_w_diag");
      if (w < 0.0) throw ConfigError("[correction] sigma_w_diag: must be nonnegative");
      spec.sigma_w = Mat(p, p);
      for (std::size_t j = 0; j < p; ++j) spec.sigma_w(j, j) = w;
      break;
    }
  }
  return spec;
}

SweepPlan sweep_from_config(const Config& cfg) {
  SweepPlan plan;
  plan.solver = solver_from_config(cfg);

  const std::string scen_name = cfg.get_string("sweep", "scenario", "uniform_missing");
  Scenario scen = Scenario::uniform_missing;
  try {
    scen = scenario_from_string(scen_name);
  } catch (const std::exception& e) {
    rethrow_as_config("[sweep] scenario", e);
  }
  const long long n = cfg.get_int("sweep", "n", 0);
  const long long p = cfg.get_int("sweep", "p", 0);
  if (n < 1) throw ConfigError("[sweep] n: must be >= 1");
  if (p < 2) throw ConfigError("[sweep] p: must be >= 2");

  const Vec omegas = cfg.get_double_list("sweep", "omega_list");
  if (omegas.empty()) throw ConfigError("[sweep] omega_list: required, comma-separated");
  Vec deltas = cfg.get_double_list("sweep", "delta_list");
  if (deltas.empty()) {
    if (scen == Scenario::full)
      deltas = {1.0};
    else
      throw ConfigError("[sweep] delta_list: required, comma-separated");
  }

  const long long reps = cfg.get_int("sweep", "replications", 0);
  if (reps < 1) throw ConfigError("[sweep] replications: must be >= 1");
  plan.replications = static_cast<int>(reps);
  plan.base_seed = static_cast<std::uint64_t>(cfg.get_int("sweep", "base_seed", 1));

  for (const std::string& name : split_list(cfg.get_string("sweep", "estimators", "sdp_corrected"))) {
    try {
      plan.estimators.push_back(estimator_from_string(name));
    } catch (const std::exception& e) {
      rethrow_as_config("[sweep] estimators", e);
    }
  }

  const double spread = cfg.get_double("sweep", "delta_spread", 0.2);
  const double d1 = cfg.get_double("sweep", "d1", 1.0);
  const double sigma_noise = cfg.get_double("sweep", "sigma_noise", 1.0);
  if (scen == Scenario::multiplicative &&
      cfg.get_string("sweep", "noise_family", "bernoulli") != "bernoulli")
    throw ConfigError(
        "[sweep] noise_family: sweeping over delta requires the bernoulli noise family");

  for (double delta : deltas) {
    for (double omega : omegas) {
      ScenarioConfig sc;
      sc.scenario = scen;
      sc.n = static_cast<std::size_t>(n);
      try {
        sc.model = make_spiked_model(static_cast<std::size_t>(p), omega);
      } catch (const std::exception& e) {
        rethrow_as_config("[sweep] model", e);
      }
      switch (scen) {
        case Scenario::full:
          break;
        case Scenario::uniform_missing:
          sc.delta = delta;
          break;
        case Scenario::multiplicative:
          sc.noise.family = NoiseFamily::bernoulli;
          sc.noise.delta = delta;
          break;
        case Scenario::nonuniform_missing:
          try {
            sc.delta_vec = delta_profile(sc.model.p, delta, spread);
          } catch (const std::exception& e) {
            rethrow_as_config("[sweep] delta profile", e);
          }
          break;
        case Scenario::lowrank_additive_missing:
          sc.delta = delta;
          sc.d1 = d1;
          sc.sigma_noise = sigma_noise;
          break;
      }
      try {
        validate_scenario(sc);
      } catch (const std::exception& e) {
        rethrow_as_config("[sweep] grid cell (omega=" + format_label(omega) + ", delta=" +
                              format_label(delta) + ")",
                          e);
      }
      plan.cells.push_back(SweepCell{std::move(sc), format_label(delta)});
    }
  }
  return plan;
}

}  // namespace speco
