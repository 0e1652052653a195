#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "speco/dense.hpp"
#include "speco/simulate.hpp"

namespace speco {

// File-system / parsing failure (missing file, malformed cell, short write).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Semantic configuration failure (bad value, unknown key, missing section).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits: doubles survive a write/parse round trip exactly.
std::string format_double(double v);

// Matrix CSV layout: header `j0,...,j(p-1)`, one row per observation, missing
// entries as empty cells. `mask` (1 = observed) selects the empty cells; pass
// nullptr when everything is observed.
void write_matrix_csv(const std::string& path, const Mat& values, const Mat* mask);

struct MatrixFile {
  Mat values;  // missing entries zero-filled
  Mat mask;    // 1 = present, 0 = empty cell or NaN token
  double observed_fraction = 1.0;
};

// Accepts empty cells and (case-insensitive) NaN tokens as missing; both are
// zero-filled with the mask recording their positions. Errors carry the path
// and 1-based line number.
MatrixFile read_matrix_csv(const std::string& path);

// Exactly the columns scenario, omega, delta_label, replication_index,
// estimator_name, error, iterations, runtime_ms, seed.
void write_result_csv(const std::string& path, const std::vector<ResultRow>& rows);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace speco
