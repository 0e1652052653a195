#include "speco/initial.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "speco/kernels.hpp"
#include "speco/linalg.hpp"

namespace speco {

namespace {

void fix_sign(Vec& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;  // strict: lowest index wins ties
  if (v[best] < 0.0)
    for (double& x : v) x = -x;
}

}  // namespace

LeadingEig leading_eigenvector(const Mat& f) {
  if (!f.square() || f.rows() < 1)
    throw std::invalid_argument("leading_eigenvector: matrix must be square and nonempty");
  const linalg::SymEig eig = linalg::eig_sym(f);  // values ascending
  const std::size_t p = f.rows();
  LeadingEig out;
  out.value = eig.values[p - 1];
  out.vector.assign(eig.vectors.row(p - 1), eig.vectors.row(p - 1) + p);
  fix_sign(out.vector);
  return out;
}

InitialEstimate make_initial(const CorrectedCovariance& sigma, const FantopeSolution& sdp) {
  const Mat& s = sigma.matrix;
  const Mat& f = sdp.f;
  if (!s.square() || !f.square() || s.rows() != f.rows())
    throw std::invalid_argument("make_initial: sigma and F dimensions must match");

  InitialEstimate out;
  out.trace_value = linalg::fro_dot(s, f);
  const LeadingEig top = leading_eigenvector(f);
  out.u1 = top.vector;
  out.degenerate = (out.trace_value == 0.0);
  const double scale = std::sqrt(std::abs(out.trace_value));
  out.beta_init.resize(out.u1.size());
  kernels::ops().scale(out.u1.data(), scale, out.beta_init.data(), out.u1.size());
  return out;
}

}  // namespace speco
