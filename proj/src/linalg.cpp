#include "speco/linalg.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "speco/kernels.hpp"

namespace speco::linalg {

SymEig eig_sym(const Mat& a) {
  if (!a.square()) throw std::invalid_argument("eig_sym: matrix must be square");
  if (!all_finite(a)) throw std::runtime_error("eig_sym: non-finite entries");
  const auto p = static_cast<lapack_int>(a.rows());
  SymEig out;
  out.vectors = a;
  out.values.assign(a.rows(), 0.0);
  // Column-major call on the row-major buffer: the input is symmetric, so the
  // transposed view is the same matrix, and the eigenvectors come back as
  // contiguous rows of `vectors` with no copy.
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', p, out.vectors.data(), p, out.values.data());
  if (info != 0)
    throw std::runtime_error("eig_sym: dsyevd failed with info=" + std::to_string(info));
  return out;
}

Mat gram(const Mat& y, double scale) {
  const auto n = static_cast<blasint>(y.rows());
  const auto p = static_cast<blasint>(y.cols());
  Mat c(y.cols(), y.cols());
  cblas_dsyrk(CblasRowMajor, CblasUpper, CblasTrans, p, n, scale, y.data(), p, 0.0, c.data(), p);
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = i + 1; j < c.cols(); ++j) c(j, i) = c(i, j);
  return c;
}

Mat weighted_outer_sum(const Mat& vec_rows, const Vec& w) {
  if (vec_rows.rows() != w.size())
    throw std::invalid_argument("weighted_outer_sum: weight count must match row count");
  const auto k = static_cast<blasint>(vec_rows.rows());
  const auto p = static_cast<blasint>(vec_rows.cols());
  Mat scaled = vec_rows;
  for (std::size_t r = 0; r < vec_rows.rows(); ++r)
    kernels::ops().scale(vec_rows.row(r), w[r], scaled.row(r), vec_rows.cols());
  Mat c(vec_rows.cols(), vec_rows.cols());
  if (k == 0) return c;
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, p, p, k, 1.0, vec_rows.data(), p,
              scaled.data(), p, 0.0, c.data(), p);
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = i + 1; j < c.cols(); ++j) c(j, i) = c(i, j);
  return c;
}

Vec matvec(const Mat& a, const Vec& x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
  Vec y(a.rows(), 0.0);
  cblas_dgemv(CblasRowMajor, CblasNoTrans, static_cast<blasint>(a.rows()),
              static_cast<blasint>(a.cols()), 1.0, a.data(), static_cast<blasint>(a.cols()),
              x.data(), 1, 0.0, y.data(), 1);
  return y;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  Mat c(a.rows(), b.cols());
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<blasint>(a.rows()),
              static_cast<blasint>(b.cols()), static_cast<blasint>(a.cols()), 1.0, a.data(),
              static_cast<blasint>(a.cols()), b.data(), static_cast<blasint>(b.cols()), 0.0,
              c.data(), static_cast<blasint>(c.cols()));
  return c;
}

Mat cholesky_lower(const Mat& a) {
  if (!a.square()) throw std::invalid_argument("cholesky_lower: matrix must be square");
  Mat l = a;
  const auto p = static_cast<lapack_int>(a.rows());
  const lapack_int info = LAPACKE_dpotrf(LAPACK_ROW_MAJOR, 'L', p, l.data(), p);
  if (info != 0)
    throw std::runtime_error("cholesky_lower: dpotrf failed with info=" + std::to_string(info));
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = i + 1; j < l.cols(); ++j) l(i, j) = 0.0;
  return l;
}

double fro_norm(const Mat& a) { return std::sqrt(kernels::ops().nrm2sq(a.data(), a.size())); }

double fro_dot(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("fro_dot: dimension mismatch");
  return kernels::ops().dot(a.data(), b.data(), a.size());
}

double quad_form(const Mat& a, const Vec& x) {
  const Vec ax = matvec(a, x);
  return kernels::ops().dot(x.data(), ax.data(), x.size());
}

}  // namespace speco::linalg
