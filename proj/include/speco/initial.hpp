#pragma once

#include "speco/correction.hpp"
#include "speco/dense.hpp"
#include "speco/fantope.hpp"

namespace speco {

// Deterministic eigenvector sign fix; eigenvectors are only defined up to
// sign, so the convention makes repeated runs bit-identical.
enum class SignConvention { largest_abs_entry_positive };

struct LeadingEig {
  Vec vector;  // unit norm, sign-fixed
  double value = 0.0;
};

// Eigenvector of the algebraically largest eigenvalue, sign-fixed so that the
// largest-|entry| coordinate is nonnegative (lowest index wins ties).
LeadingEig leading_eigenvector(const Mat& f);

struct InitialEstimate {
  Vec u1;         // unit leading eigenvector of the relaxation output
  Vec beta_init;  // sqrt(|trace_value|) * u1
  double trace_value = 0.0;  // <sigma, F>, signed
  SignConvention sign_convention = SignConvention::largest_abs_entry_positive;
  bool degenerate = false;  // trace_value == 0: beta_init is the zero vector
};

InitialEstimate make_initial(const CorrectedCovariance& sigma, const FantopeSolution& sdp);

}  // namespace speco
