#pragma once

#include <optional>

#include "speco/data.hpp"

namespace speco {

enum class CorrectionKind { none, uniform_missing, multiplicative, nonuniform, lowrank };
enum class GramScale { mean_normalized, raw_gram };

const char* to_string(CorrectionKind k);
CorrectionKind correction_kind_from_string(const std::string& name);

// Parameters of the bias correction applied to the observed Gram matrix.
//
// For `lowrank` the estimation target is the raw Gram X'X (no 1/n), and
// sigma_w must be the expected Gram of the additive noise, E[W'W]; for n
// i.i.d. mean-zero noise rows with per-row covariance C that is n*C. Passing
// the per-row covariance instead would leave a bias of (n-1)*C.
struct CorrectionSpec {
  CorrectionKind variant = CorrectionKind::none;
  GramScale scale = GramScale::mean_normalized;
  double delta = 1.0;  // uniform_missing, lowrank
  Vec delta_vec;       // nonuniform
  Mat m;               // multiplicative: E[U1 U1'], all entries > 0
  Mat sigma_w;         // lowrank: E[W'W]
};

// Bias-corrected surrogate covariance. Exactly symmetric by construction and
// possibly indefinite; downstream consumers must not assume PSD.
struct CorrectedCovariance {
  Mat matrix;
  CorrectionSpec spec;
  std::optional<double> min_eigenvalue_hint;
};

CorrectedCovariance uncorrected_covariance(const ObservedData& data);
CorrectedCovariance correct_uniform_missing(const ObservedData& data, double delta);
CorrectedCovariance correct_multiplicative(const ObservedData& data, const Mat& m);
CorrectedCovariance correct_nonuniform(const ObservedData& data, const Vec& delta_vec);
CorrectedCovariance correct_lowrank_additive(const ObservedData& data, double delta,
                                             const Mat& sigma_w);
CorrectedCovariance apply_correction(const ObservedData& data, const CorrectionSpec& spec);

}  // namespace speco
