#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "gss/flow.hpp"
#include "gss/sampling.hpp"

namespace gss {

/// Angle of the page P = {x0 = 0, y0 ≥ 0} under page_angle().
inline constexpr double kPageAngle = std::numbers::pi / 2.0;

/// arg(x0 + i·y0) in [0, 2π). Throws OnBindingError on the binding.
double page_angle(const PhasePoint& phase);

/// A(x, y) = (Hess(f)ₓ(y,y)/‖∇f‖²)·(f₀(x)/x₀). For |x0| ≤ 1e-4·scale the
/// quotient f₀/x₀ is replaced by f₀₀(0, x⃗).
double a_value(const DefiningSurface& surface, const PhasePoint& phase);

struct ThetaValue {
  double theta;  // θ(X_H) = A·x₀² + y₀²
  double Theta;  // θ(X_H)/(x₀² + y₀²)
};

/// θ(X_H) and Θ(X_H). Θ is undefined on the binding (OnBindingError).
ThetaValue theta_of_field(const DefiningSurface& surface, const PhasePoint& phase);

struct EpsilonEstimate {
  double epsilon = 0.0;  // sampled minimum of A
  PhasePoint argmin;
  std::size_t samples = 0;
  /// Lower bound used for Θ(X_H) ≥ min(A, 1).
  double theta_bound() const { return std::min(epsilon, 1.0); }
  /// 2π/min(ε, 1), the return-time bound.
  double return_time_bound() const { return 2.0 * std::numbers::pi / theta_bound(); }
};

/// Heuristic lower bound for A over Y∖B: minimum over quasi-random phases
/// (including binding phases, through the f₀₀ branch), refined by coordinate
/// descent at the 10 smallest samples. Throws NonPositiveEpsilon if ≤ 0.
EpsilonEstimate estimate_epsilon(const DefiningSurface& surface, std::size_t samples);

/// Snap a phase onto the page at angle kPageAngle + offset, i.e. the set where
/// the winding angle is −(π/2 + offset), then project onto Y.
PhasePoint project_to_page(const DefiningSurface& surface, const PhasePoint& phase, double page_offset = 0.0);

struct ReturnRecord {
  PhasePoint start;
  PhasePoint end;
  double tau = 0.0;
  std::size_t steps = 0;
  double max_drift = 0.0;
  double angle_total = 0.0;
};

/// First return to the page: integrate until the unwrapped winding angle has
/// advanced by 2π·turns, refine the crossing by bisection to 1e-12 in angle,
/// then project the end onto the page.
ReturnRecord return_map(const DefiningSurface& surface, const PhasePoint& start, const IntegratorConfig& config,
                        double page_offset = 0.0, int turns = 1);

/// A quasi-random start on P: a point of the equator with an upward unit
/// covector, drawn from `rng`.
PhasePoint random_page_start(const DefiningSurface& surface, Rng& rng);

/// Orthonormal basis (columns, in ℝ^{2(n+1)} = (δx, δy)) of the tangent
/// space of P at a page point.
Mat page_tangent_basis(const DefiningSurface& surface, const PhasePoint& phase);

struct SymplecticityDefect {
  double symplectic = 0.0;  // ‖JᵀΩJ − Ω‖_max
  double exactness = 0.0;   // max_v |α(dΨ·v) − α(v) − Dτ·v|
};

/// Central-difference Jacobian of Ψ at `start` in page coordinates.
SymplecticityDefect symplecticity_defect(const DefiningSurface& surface, const PhasePoint& start, double h,
                                         const IntegratorConfig& config);

struct NormalHessianSample {
  PhasePoint binding_point;
  double s00 = 0.0;
  double s11 = 1.0;
  bool positive_definite() const { return s00 > 0.0; }
};

/// S_N = diag(Hess(f)ₓ(y,y)·f₀₀(x)/‖∇f(x)‖², 1) at a point of the binding.
NormalHessianSample normal_hessian(const DefiningSurface& surface, const PhasePoint& binding_point);

/// A binding point from an equator point and a covector direction.
PhasePoint make_binding_point(const DefiningSurface& surface, const Vec& x, const Vec& y_direction);

struct BoundaryExtrapolation {
  PhasePoint limit;
  std::vector<PhasePoint> ends;     // return_map endpoints per offset
  double convergence_ratio = 0.0;   // last |Δe| / previous |Δe|
  double offset_ratio = 0.0;        // last offset / previous offset
};

/// Polynomial extrapolation to offset 0 of the return map started at
/// y0 = offset above `binding_point`. Throws NonConvergent if the endpoint
/// differences do not contract.
BoundaryExtrapolation boundary_return_extrapolation(const DefiningSurface& surface, const PhasePoint& binding_point,
                                                    std::span<const double> offsets, const IntegratorConfig& config);

}  // namespace gss
