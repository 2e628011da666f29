#pragma once

#include <cstddef>
#include <functional>

namespace gss {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // Kronrod-minus-Gauss estimate, summed over intervals
  std::size_t intervals = 0;
  bool converged = false;
};

/// Globally adaptive 7/15-point Gauss–Kronrod quadrature on [a, b]. Splits the
/// interval with the largest error until error ≤ max(abs_tol, rel_tol·|value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-13,
                           double rel_tol = 1e-14, std::size_t max_intervals = 4000);

}  // namespace gss
