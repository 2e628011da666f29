#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace gss {

/// Second-order forward-mode jet: value, gradient and Hessian of a scalar
/// function of `dim` variables. The Hessian is stored as a packed upper
/// triangle, so symmetry holds by construction.
class JetValue {
 public:
  JetValue() = default;
  explicit JetValue(std::size_t dim, double value = 0.0)
      : value_(value), grad_(dim, 0.0), hess_(dim * (dim + 1) / 2, 0.0) {}

  /// The jet of the coordinate function x_index evaluated at `at`.
  static JetValue variable(std::size_t dim, std::size_t index, double at) {
    JetValue j(dim, at);
    j.grad_[index] = 1.0;
    return j;
  }

  std::size_t dim() const noexcept { return grad_.size(); }
  double value() const noexcept { return value_; }
  double grad(std::size_t i) const { return grad_[i]; }
  double hess(std::size_t i, std::size_t j) const { return hess_[packed(i, j)]; }

  Eigen::VectorXd gradient() const;
  Eigen::MatrixXd hessian() const;

  friend JetValue operator+(const JetValue& a, const JetValue& b);
  friend JetValue operator-(const JetValue& a, const JetValue& b);
  friend JetValue operator*(const JetValue& a, const JetValue& b);
  friend JetValue operator/(const JetValue& a, const JetValue& b);
  JetValue operator-() const;

  /// Composition g∘u given g(u), g'(u), g''(u) at the current value.
  JetValue compose(double g0, double g1, double g2) const;

 private:
  std::size_t packed(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    // row-major upper triangle
    return i * dim() - i * (i - 1) / 2 + (j - i);
  }

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

}  // namespace gss
