#include "gss/flow.hpp"

#include <cmath>
#include <charconv>
#include <string>

#include "gss/error.hpp"

namespace gss {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBindingRadius2 = 1e-20;

struct Stage {
  Vec x;
  Vec y;
};

Stage field(const DefiningSurface& surface, const Vec& x, const Vec& y) {
  const SurfaceJet j = surface.jet(x);
  const double g2 = j.grad.squaredNorm();
  if (!(std::sqrt(g2) >= kRegularityFloor)) throw Error(ErrorKind::regularity, "‖∇f‖ below floor along the flow");
  const double lambda = y.dot(j.hess * y) / g2;
  return {y, -lambda * j.grad};
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double wrap_near(double angle, double target) {
  return angle - kTwoPi * std::round((angle - target) / kTwoPi);
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(base_step > 0.0)) throw Error(ErrorKind::config, "integrator.base_step must be positive");
  if (!(max_angle_per_step > 0.0 && max_angle_per_step < std::numbers::pi / 2.0))
    throw Error(ErrorKind::config, "integrator.max_angle_per_step must lie in (0, pi/2)");
  if (!(constraint_tolerance > 0.0)) throw Error(ErrorKind::config, "integrator.constraint_tolerance must be positive");
  if (max_steps == 0) throw Error(ErrorKind::config, "integrator.max_steps must be positive");
}

FieldValue geodesic_vector_field(const DefiningSurface& surface, const PhasePoint& phase) {
  Stage s = field(surface, phase.x, phase.y);
  return {std::move(s.x), std::move(s.y)};
}

double winding_rate(const DefiningSurface& surface, const PhasePoint& phase) {
  const SurfaceJet j = surface.jet(phase.x);
  const double lambda = phase.y.dot(j.hess * phase.y) / j.grad.squaredNorm();
  const double x0 = phase.x(0), y0 = phase.y(0);
  const double r2 = x0 * x0 + y0 * y0;
  if (r2 < kBindingRadius2) {
    // Rate lies between A = λ·f₀₀ and 1 here.
    return 0.5 * (lambda * j.hess(0, 0) + 1.0);
  }
  return (lambda * j.grad(0) * x0 + y0 * y0) / r2;
}

double winding_angle(const PhasePoint& phase) { return -std::atan2(phase.y(0), phase.x(0)); }

FlowState step(const DefiningSurface& surface, const FlowState& state, const IntegratorConfig& config, double h) {
  const double base = std::abs(h);
  const double rate0 = winding_rate(surface, state.phase);
  if (std::abs(rate0 * h) > config.max_angle_per_step) h = std::copysign(config.max_angle_per_step / std::abs(rate0), h);

  for (;;) {
    if (std::abs(h) < 1e-14 * std::max(base, 1e-300) || std::abs(h) < 1e-300)
      throw Error(ErrorKind::step_size_underflow, "step size underflow at t = " + std::to_string(state.time));
    const Vec& x = state.phase.x;
    const Vec& y = state.phase.y;
    const Stage k1 = field(surface, x, y);
    const Stage k2 = field(surface, x + 0.5 * h * k1.x, y + 0.5 * h * k1.y);
    const Stage k3 = field(surface, x + 0.5 * h * k2.x, y + 0.5 * h * k2.y);
    const Stage k4 = field(surface, x + h * k3.x, y + h * k3.y);
    const Vec x_raw = x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    const Vec y_raw = y + (h / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);

    FlowState next;
    next.drift = residuals(surface, {x_raw, y_raw}).max();
    next.phase = project_to_surface(surface, x_raw, y_raw);
    next.time = state.time + h;

    // Simpson quadrature of the winding rate selects the 2π branch of the
    // exact atan2 increment.
    const PhasePoint mid{x + 0.5 * h * k2.x, y + 0.5 * h * k2.y};
    const double rate1 = winding_rate(surface, next.phase);
    const double quad = (h / 6.0) * (rate0 + 4.0 * winding_rate(surface, mid) + rate1);
    const double r0 = x(0) * x(0) + y(0) * y(0);
    const double r1 = next.phase.x(0) * next.phase.x(0) + next.phase.y(0) * next.phase.y(0);
    double increment = quad;
    if (r0 >= kBindingRadius2 && r1 >= kBindingRadius2)
      increment = wrap_near(winding_angle(next.phase) - winding_angle(state.phase), quad);
    if (std::abs(increment) > 1.5 * config.max_angle_per_step) {
      h *= 0.5;
      continue;
    }
    next.unwrapped_angle = state.unwrapped_angle + increment;

    const ConstraintResiduals res = residuals(surface, next.phase);
    if (!(res.max() < config.constraint_tolerance))
      throw Error(ErrorKind::projection_diverged,
                  "constraint residual " + std::to_string(res.max()) + " after projection");
    return next;
  }
}

FlowState step(const DefiningSurface& surface, const FlowState& state, const IntegratorConfig& config) {
  return step(surface, state, config, config.base_step);
}

FlowState flow_state_to_time(const DefiningSurface& surface, const FlowState& start, double t,
                             const IntegratorConfig& config) {
  FlowState state = start;
  const double end = start.time + t;
  const double direction = t < 0.0 ? -1.0 : 1.0;
  const double slack = 1e-12 * std::max(std::abs(t), 1.0);
  std::size_t steps = 0;
  while (direction * (end - state.time) > slack) {
    if (++steps > config.max_steps) throw Error(ErrorKind::max_steps_exceeded, "flow_to_time exceeded max_steps");
    const double remaining = std::abs(end - state.time);
    state = step(surface, state, config, direction * std::min(config.base_step, remaining));
  }
  return state;
}

PhasePoint flow_to_time(const DefiningSurface& surface, const PhasePoint& phase, double t,
                        const IntegratorConfig& config) {
  FlowState start;
  start.phase = phase;
  return flow_state_to_time(surface, start, t, config).phase;
}

std::vector<FlowState> trajectory(const DefiningSurface& surface, const PhasePoint& phase, double t,
                                  const IntegratorConfig& config) {
  std::vector<FlowState> out;
  FlowState state;
  state.phase = phase;
  if (std::abs(phase.x(0)) + std::abs(phase.y(0)) > 0.0) state.unwrapped_angle = winding_angle(phase);
  out.push_back(state);
  const double direction = t < 0.0 ? -1.0 : 1.0;
  const double slack = 1e-12 * std::max(std::abs(t), 1.0);
  while (direction * (t - state.time) > slack) {
    if (out.size() > config.max_steps) throw Error(ErrorKind::max_steps_exceeded, "trajectory exceeded max_steps");
    const double remaining = std::abs(t - state.time);
    state = step(surface, state, config, direction * std::min(config.base_step, remaining));
    out.push_back(state);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const DefiningSurface& surface, const std::vector<FlowState>& states) {
  const std::size_t dim = surface.ambient_dim();
  os << "t";
  for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
  for (std::size_t i = 0; i < dim; ++i) os << ",y" << i;
  os << ",abs_f,abs_y_dot_grad,norm_y_minus_1,unwrapped_angle\n";
  for (const FlowState& s : states) {
    const ConstraintResiduals r = residuals(surface, s.phase);
    os << shortest(s.time);
    for (Eigen::Index i = 0; i < s.phase.x.size(); ++i) os << ',' << shortest(s.phase.x(i));
    for (Eigen::Index i = 0; i < s.phase.y.size(); ++i) os << ',' << shortest(s.phase.y(i));
    os << ',' << shortest(r.value) << ',' << shortest(r.tangency) << ',' << shortest(s.phase.y.norm() - 1.0) << ','
       << shortest(s.unwrapped_angle) << '\n';
  }
}

}  // namespace gss
