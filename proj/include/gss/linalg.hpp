#pragma once

#include <Eigen/Dense>

namespace gss {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct SymmetricEigen {
  Vec values;   // ascending
  Mat vectors;  // column k pairs with values(k)
};

/// Cyclic Jacobi rotations for a small dense symmetric matrix.
SymmetricEigen jacobi_eigen(const Mat& symmetric, double tolerance = 1e-15, int max_sweeps = 64);

/// Orthonormal basis (as columns) of the null space of `constraints`, whose
/// rows are assumed linearly independent.
Mat orthonormal_null_space(const Mat& constraints);

/// Symmetric bilinear form ½(aᵀHb + bᵀHa); bitwise symmetric in (a, b).
inline double bilinear(const Mat& h, const Vec& a, const Vec& b) {
  return 0.5 * (a.dot(h * b) + b.dot(h * a));
}

}  // namespace gss
