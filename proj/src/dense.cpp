#include "speco/dense.hpp"

#include <cmath>
#include <stdexcept>

#include "speco/kernels.hpp"

namespace speco {

Mat::Mat(std::size_t rows, std::size_t cols, Vec values)
    : rows_(rows), cols_(cols), d_(std::move(values)) {
  if (d_.size() != rows * cols)
    throw std::invalid_argument("Mat: value count does not match dimensions");
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

void symmetrize(Mat& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

double max_abs_asymmetry(const Mat& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst;
}

double trace(const Mat& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

Vec diagonal(const Mat& a) {
  Vec d(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) d[i] = a(i, i);
  return d;
}

Mat outer(const Vec& x) {
  Mat m(x.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) m(i, j) = x[i] * x[j];
  return m;
}

bool all_finite(const Mat& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.data()[i])) return false;
  return true;
}

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double l2_norm(const Vec& v) {
  return std::sqrt(kernels::ops().nrm2sq(v.data(), v.size()));
}

}  // namespace speco
