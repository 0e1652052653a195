#pragma once

#include <map>
#include <string>

#include "speco/correction.hpp"
#include "speco/io.hpp"
#include "speco/pipeline.hpp"
#include "speco/simulate.hpp"

namespace speco {

// Flat INI-style run configuration: `[section]` headers, `key = value` pairs,
// `#` or `;` comments, blank lines ignored. Lookups mark keys as consumed so
// ensure_all_used() can reject typos instead of silently ignoring them.
class Config {
 public:
  static Config from_file(const std::string& path);   // IoError / ConfigError
  static Config from_string(const std::string& text, const std::string& origin);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  double require_double(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  Vec get_double_list(const std::string& section, const std::string& key) const;  // empty if absent

  // Throws ConfigError naming the first key that no builder consumed.
  void ensure_all_used() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

  const Entry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const Entry& entry, const std::string& why) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

// Section builders. Each consumes only its own keys; callers combine them per
// command and finish with ensure_all_used().
ScenarioConfig scenario_from_config(const Config& cfg);                     // [scenario]
SolverSettings solver_from_config(const Config& cfg);                      // [solver]
CorrectionSpec correction_from_config(const Config& cfg, std::size_t p);   // [correction]
SweepPlan sweep_from_config(const Config& cfg);                            // [sweep] + [solver]

// Evenly spaced per-variable observation probabilities over
// [center - spread/2, center + spread/2], clamped above at 1; the low end
// must stay positive.
Vec delta_profile(std::size_t p, double center, double spread);

}  // namespace speco
