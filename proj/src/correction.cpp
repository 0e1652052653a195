#include "speco/correction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "speco/kernels.hpp"
#include "speco/linalg.hpp"

namespace speco {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("correction: observation probability must lie in (0,1], got " +
                                std::to_string(delta));
}

// Divide the Gram matrix by the implicit mask-moment matrix of a uniform
// mask: delta*delta off the diagonal, delta on it. Shared by the uniform and
// low-rank corrections so the two stay bit-consistent with the explicit-M
// route.
Mat divide_by_mask_moments(const Mat& g, double delta) {
  const double dd = delta * delta;
  Mat out(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) out(i, j) = g(i, j) / (i == j ? delta : dd);
  return out;
}

}  // namespace

const char* to_string(CorrectionKind k) {
  switch (k) {
    case CorrectionKind::none: return "none";
    case CorrectionKind::uniform_missing: return "uniform_missing";
    case CorrectionKind::multiplicative: return "multiplicative";
    case CorrectionKind::nonuniform: return "nonuniform";
    case CorrectionKind::lowrank: return "lowrank";
  }
  return "unknown";
}

CorrectionKind correction_kind_from_string(const std::string& name) {
  if (name == "none") return CorrectionKind::none;
  if (name == "uniform_missing") return CorrectionKind::uniform_missing;
  if (name == "multiplicative") return CorrectionKind::multiplicative;
  if (name == "nonuniform") return CorrectionKind::nonuniform;
  if (name == "lowrank") return CorrectionKind::lowrank;
  throw std::invalid_argument("unknown correction: " + name);
}

CorrectedCovariance uncorrected_covariance(const ObservedData& data) {
  validate(data);
  CorrectedCovariance out;
  out.matrix = linalg::gram(data.values, 1.0 / static_cast<double>(data.n_rows()));
  out.spec.variant = CorrectionKind::none;
  return out;
}

CorrectedCovariance correct_uniform_missing(const ObservedData& data, double delta) {
  validate(data);
  check_delta(delta);
  const Mat g = linalg::gram(data.values, 1.0 / static_cast<double>(data.n_rows()));
  CorrectedCovariance out;
  out.matrix = divide_by_mask_moments(g, delta);
  out.spec.variant = CorrectionKind::uniform_missing;
  out.spec.delta = delta;
  return out;
}

CorrectedCovariance correct_multiplicative(const ObservedData& data, const Mat& m) {
  validate(data);
  if (!m.square() || m.rows() != data.n_cols())
    throw std::invalid_argument("correct_multiplicative: M must be p x p");
  if (!all_finite(m)) throw std::invalid_argument("correct_multiplicative: M has non-finite entries");
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!(m.data()[i] > 0.0))
      throw std::invalid_argument("correct_multiplicative: M entries must be positive");
  if (max_abs_asymmetry(m) > 1e-12)
    throw std::invalid_argument("correct_multiplicative: M must be symmetric within 1e-12");
  Mat msym = m;
  symmetrize(msym);
  const Mat g = linalg::gram(data.values, 1.0 / static_cast<double>(data.n_rows()));
  CorrectedCovariance out;
  out.matrix = Mat(g.rows(), g.cols());
  kernels::ops().ewise_div(g.data(), msym.data(), out.matrix.data(), g.size());
  out.spec.variant = CorrectionKind::multiplicative;
  out.spec.m = msym;
  return out;
}

CorrectedCovariance correct_nonuniform(const ObservedData& data, const Vec& delta_vec) {
  validate(data);
  if (delta_vec.size() != data.n_cols())
    throw std::invalid_argument("correct_nonuniform: delta_vec length must equal column count");
  for (double d : delta_vec) check_delta(d);
  Mat m(delta_vec.size(), delta_vec.size());
  for (std::size_t i = 0; i < delta_vec.size(); ++i)
    for (std::size_t j = 0; j < delta_vec.size(); ++j)
      m(i, j) = i == j ? delta_vec[i] : delta_vec[i] * delta_vec[j];
  CorrectedCovariance out = correct_multiplicative(data, m);
  out.spec.variant = CorrectionKind::nonuniform;
  out.spec.delta_vec = delta_vec;
  return out;
}

CorrectedCovariance correct_lowrank_additive(const ObservedData& data, double delta,
                                             const Mat& sigma_w) {
  validate(data);
  check_delta(delta);
  if (!sigma_w.square() || sigma_w.rows() != data.n_cols())
    throw std::invalid_argument("correct_lowrank_additive: sigma_w must be p x p");
  if (!all_finite(sigma_w))
    throw std::invalid_argument("correct_lowrank_additive: sigma_w has non-finite entries");
  if (max_abs_asymmetry(sigma_w) > 1e-12)
    throw std::invalid_argument("correct_lowrank_additive: sigma_w must be symmetric within 1e-12");
  Mat sw = sigma_w;
  symmetrize(sw);
  // Raw Gram, no 1/n: the target here is X'X itself.
  const Mat g = linalg::gram(data.values, 1.0);
  CorrectedCovariance out;
  out.matrix = divide_by_mask_moments(g, delta);
  kernels::ops().axpy(-1.0, sw.data(), out.matrix.data(), sw.size());
  out.spec.variant = CorrectionKind::lowrank;
  out.spec.scale = GramScale::raw_gram;
  out.spec.delta = delta;
  out.spec.sigma_w = sw;
  return out;
}

CorrectedCovariance apply_correction(const ObservedData& data, const CorrectionSpec& spec) {
  switch (spec.variant) {
    case CorrectionKind::none: return uncorrected_covariance(data);
    case CorrectionKind::uniform_missing: return correct_uniform_missing(data, spec.delta);
    case CorrectionKind::multiplicative: return correct_multiplicative(data, spec.m);
    case CorrectionKind::nonuniform: return correct_nonuniform(data, spec.delta_vec);
    case CorrectionKind::lowrank: return correct_lowrank_additive(data, spec.delta, spec.sigma_w);
  }
  throw std::invalid_argument("apply_correction: unknown variant");
}

}  // namespace speco
