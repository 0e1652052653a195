#pragma once

#include <string>

#include "speco/dense.hpp"

namespace speco {

enum class Scenario {
  full,
  uniform_missing,
  multiplicative,
  nonuniform_missing,
  lowrank_additive_missing,
};

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

// Observed data matrix. Missing entries are encoded as exact zeros (the mask
// model is Y_ij = delta_ij * X_ij), so the matrix itself is always fully
// finite; NaN conversion happens at the file-ingestion layer.
struct ObservedData {
  Mat values;  // n x p
  Scenario scenario_tag = Scenario::full;

  std::size_t n_rows() const { return values.rows(); }
  std::size_t n_cols() const { return values.cols(); }
};

void validate(const ObservedData& data);  // finite entries, n >= 1, p >= 2

}  // namespace speco
