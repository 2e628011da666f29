#pragma once

#include <cstddef>
#include <numbers>
#include <ostream>
#include <vector>

#include "gss/surface.hpp"

namespace gss {

struct IntegratorConfig {
  double base_step = 2.0 * std::numbers::pi * 1e-3;
  double max_angle_per_step = std::numbers::pi / 8.0;
  double constraint_tolerance = 1e-10;
  std::size_t max_steps = 10'000'000;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// A point of the flow. `unwrapped_angle` is the accumulated winding around
/// the binding {x0 = y0 = 0}; it equals −arg(x0 + i·y0) up to a multiple of 2π
/// and increases along the forward flow of an audited surface.
struct FlowState {
  PhasePoint phase;
  double time = 0.0;
  double unwrapped_angle = 0.0;
  double drift = 0.0;  // raw constraint residual before the last projection
};

struct FieldValue {
  Vec x_dot;
  Vec y_dot;
};

/// ẋ = y, ẏ = −(Hess(f)ₓ(y,y)/‖∇f(x)‖²)·∇f(x).
FieldValue geodesic_vector_field(const DefiningSurface& surface, const PhasePoint& phase);

/// Winding rate (λ·f₀·x₀ + y₀²)/(x₀² + y₀²) with λ = Hess(y,y)/‖∇f‖². Near the
/// binding, where it is 0/0, returns the mean of its two limiting bounds.
double winding_rate(const DefiningSurface& surface, const PhasePoint& phase);

/// −arg(x0 + i·y0).
double winding_angle(const PhasePoint& phase);

/// One RK4 step of signed size `h` (shrunk if the winding increment would
/// exceed max_angle_per_step) followed by projection onto Y.
FlowState step(const DefiningSurface& surface, const FlowState& state, const IntegratorConfig& config, double h);

/// One step of size config.base_step.
FlowState step(const DefiningSurface& surface, const FlowState& state, const IntegratorConfig& config);

/// The flow at time t; negative t integrates backwards.
FlowState flow_state_to_time(const DefiningSurface& surface, const FlowState& start, double t,
                             const IntegratorConfig& config);
PhasePoint flow_to_time(const DefiningSurface& surface, const PhasePoint& phase, double t,
                        const IntegratorConfig& config);

/// Every accepted state from 0 to t, including both ends.
std::vector<FlowState> trajectory(const DefiningSurface& surface, const PhasePoint& phase, double t,
                                  const IntegratorConfig& config);

/// Columns t, x0..xn, y0..yn, abs_f, abs_y_dot_grad, norm_y_minus_1, unwrapped_angle.
void write_trajectory_csv(std::ostream& os, const DefiningSurface& surface, const std::vector<FlowState>& states);

}  // namespace gss
