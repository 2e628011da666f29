#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gss {

enum class ErrorKind {
  syntax,
  unknown_identifier,
  dimension_mismatch,
  non_smooth_function,
  domain,
  regularity,
  indefinite,
  degenerate_plane,
  projection_diverged,
  zero_covector,
  step_size_underflow,
  max_steps_exceeded,
  on_binding,
  not_on_binding,
  non_positive_epsilon,
  non_convergent,
  quadrature_failure,
  pole_point,
  unsupported_surface,
  config,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes failure modes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gss
