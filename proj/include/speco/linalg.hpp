#pragma once

#include "speco/dense.hpp"

// Thin wrappers over LAPACKE/CBLAS for the dense factorizations and
// matrix-level products; everything elementwise or fused goes through the
// kernel layer instead.
namespace speco::linalg {

struct SymEig {
  Vec values;   // ascending
  Mat vectors;  // p x p; eigenvector k is stored in row k, paired with values[k]
};

SymEig eig_sym(const Mat& a);                                // a symmetric
Mat gram(const Mat& y, double scale);                        // scale * Y'Y, exactly symmetric
Mat weighted_outer_sum(const Mat& vec_rows, const Vec& w);   // sum_k w[k] * v_k v_k'
Vec matvec(const Mat& a, const Vec& x);
Mat matmul(const Mat& a, const Mat& b);
Mat cholesky_lower(const Mat& a);                            // a symmetric positive definite
double fro_norm(const Mat& a);
double fro_dot(const Mat& a, const Mat& b);
double quad_form(const Mat& a, const Vec& x);                // x'Ax

}  // namespace speco::linalg
