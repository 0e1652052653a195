#pragma once

#include <cstddef>
#include <vector>

namespace speco {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. The flat buffer is exposed so the
// kernel layer and the LAPACK/BLAS wrappers can operate on it directly.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), d_(rows * cols, fill) {}
  Mat(std::size_t rows, std::size_t cols, Vec values);

  static Mat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return d_.size(); }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }
  double* row(std::size_t i) { return d_.data() + i * cols_; }
  const double* row(std::size_t i) const { return d_.data() + i * cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec d_;
};

Mat transpose(const Mat& a);
void symmetrize(Mat& a);  // a <- (a + a') / 2
double max_abs_asymmetry(const Mat& a);
double trace(const Mat& a);
Vec diagonal(const Mat& a);
Mat outer(const Vec& x);  // x x'
bool all_finite(const Mat& a);
bool all_finite(const Vec& v);
double l2_norm(const Vec& v);

}  // namespace speco
