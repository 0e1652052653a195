#include "speco/data.hpp"

#include <stdexcept>

namespace speco {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::full: return "full";
    case Scenario::uniform_missing: return "uniform_missing";
    case Scenario::multiplicative: return "multiplicative";
    case Scenario::nonuniform_missing: return "nonuniform_missing";
    case Scenario::lowrank_additive_missing: return "lowrank_additive_missing";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "full") return Scenario::full;
  if (name == "uniform_missing") return Scenario::uniform_missing;
  if (name == "multiplicative") return Scenario::multiplicative;
  if (name == "nonuniform_missing") return Scenario::nonuniform_missing;
  if (name == "lowrank_additive_missing") return Scenario::lowrank_additive_missing;
  throw std::invalid_argument("unknown scenario: " + name);
}

void validate(const ObservedData& data) {
  if (data.n_rows() < 1) throw std::invalid_argument("ObservedData: need at least one row");
  if (data.n_cols() < 2) throw std::invalid_argument("ObservedData: need at least two columns");
  if (!all_finite(data.values))
    throw std::invalid_argument("ObservedData: non-finite entries (missing values must be zeros)");
}

}  // namespace speco
