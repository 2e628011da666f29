#include "gss/jet.hpp"

#include <cassert>

namespace gss {

Eigen::VectorXd JetValue::gradient() const {
  return Eigen::Map<const Eigen::VectorXd>(grad_.data(), static_cast<Eigen::Index>(grad_.size()));
}

Eigen::MatrixXd JetValue::hessian() const {
  const auto n = dim();
  Eigen::MatrixXd h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      h(i, j) = hess_[packed(i, j)];
      h(j, i) = h(i, j);
    }
  return h;
}

JetValue operator+(const JetValue& a, const JetValue& b) {
  assert(a.dim() == b.dim());
  JetValue r = a;
  r.value_ += b.value_;
  for (std::size_t i = 0; i < r.grad_.size(); ++i) r.grad_[i] += b.grad_[i];
  for (std::size_t i = 0; i < r.hess_.size(); ++i) r.hess_[i] += b.hess_[i];
  return r;
}

JetValue operator-(const JetValue& a, const JetValue& b) {
  assert(a.dim() == b.dim());
  JetValue r = a;
  r.value_ -= b.value_;
  for (std::size_t i = 0; i < r.grad_.size(); ++i) r.grad_[i] -= b.grad_[i];
  for (std::size_t i = 0; i < r.hess_.size(); ++i) r.hess_[i] -= b.hess_[i];
  return r;
}

JetValue JetValue::operator-() const {
  JetValue r = *this;
  r.value_ = -r.value_;
  for (auto& g : r.grad_) g = -g;
  for (auto& h : r.hess_) h = -h;
  return r;
}

JetValue operator*(const JetValue& a, const JetValue& b) {
  assert(a.dim() == b.dim());
  const auto n = a.dim();
  JetValue r(n, a.value_ * b.value_);
  for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.value_ * b.grad_[i] + b.value_ * a.grad_[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto k = r.packed(i, j);
      r.hess_[k] = a.value_ * b.hess_[k] + b.value_ * a.hess_[k] + a.grad_[i] * b.grad_[j] +
                   a.grad_[j] * b.grad_[i];
    }
  return r;
}

JetValue operator/(const JetValue& a, const JetValue& b) {
  // a * (1/b); caller has already rejected b == 0
  const double v = b.value_;
  return a * b.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

JetValue JetValue::compose(double g0, double g1, double g2) const {
  const auto n = dim();
  JetValue r(n, g0);
  for (std::size_t i = 0; i < n; ++i) r.grad_[i] = g1 * grad_[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto k = packed(i, j);
      r.hess_[k] = g1 * hess_[k] + g2 * grad_[i] * grad_[j];
    }
  return r;
}

}  // namespace gss
