#pragma once

#include "gss/linalg.hpp"
#include "gss/surface.hpp"

namespace gss {

/// Incomplete elliptic integrals in parameter convention:
///   F(φ | m)    = ∫₀^φ dθ / √(1 − m sin²θ)
///   Π(n; φ | m) = ∫₀^φ dθ / ((1 − n sin²θ) √(1 − m sin²θ))
/// Any real amplitude is accepted; amplitudes past π/2 are reduced through the
/// quarter period. Negative m is allowed. DomainError when an integrand is
/// singular on the range.
struct EllipticArgs {
  double phi = 0.0;
  double m = 0.0;
  double n = 0.0;
};

double elliptic_f(const EllipticArgs& args);
double elliptic_pi(const EllipticArgs& args);

/// Return angle for the ellipsoid x0²/a0² + ‖x⃗‖² = 1 as a function of
/// t = ‖y⃗‖ ∈ (0, 1]:
///   G(t) = −(t(1−a0²)/a0)·F(2π | m) + (t/a0)·Π(1−t²; 2π | m),
///   m = −(1−a0²)(1−t²)/a0².
double ellipsoid_g(double t, double a0);

/// Clairaut-integral return angle for the profile a(φ), t ∈ [1e-3, 1]:
///   G(t) = t ∫₀^{2π} √((1−t²)sin²σ + a′(arcsin(√(1−t²) sin σ))²) / (1 − (1−t²)sin²σ) dσ.
/// Absolute accuracy 1e-9 or QuadratureFailure.
double clairaut_g(double t, const RevolutionProfile& profile);

/// Billiard-limit angle 4·arccos t; G₀(0) = 2π by continuity.
double billiard_g(double t);

struct PagePoint {
  Vec xhat;   // point of the unit equator in ℝⁿ
  double y0;  // vertical covector component
  Vec yvec;   // covector component tangent to the equator
};

/// Rotation of (x⃗, y⃗) by `g_value` in the plane of x⃗ and y⃗/‖y⃗‖; y0 is
/// unchanged. PolePoint when y⃗ = 0.
PagePoint closed_form_return_map(const Vec& xhat, double y0, const Vec& yvec, double g_value);

/// Closed-form Ψ for a surface whose return angle is known: ellipsoids
/// (a0, 1, …, 1), spheres and revolution surfaces. A start with y⃗ = 0 runs
/// along a meridian and returns to itself. UnsupportedSurface otherwise.
PhasePoint closed_form_return(const DefiningSurface& surface, const PhasePoint& start);

/// G(‖y⃗‖) for the surfaces supported by closed_form_return.
double closed_form_angle(const DefiningSurface& surface, double t);

struct BilliardPoint {
  Vec xhat;
  Vec y_t;  // tangential part of the unit velocity
};

/// Second iterate of the billiard map in the unit ball: the rotation formula
/// with G₀(‖y_T‖) = 4·arccos‖y_T‖. ‖y_T‖ = 0 (a diameter) returns the start.
BilliardPoint billiard_second_iterate(const Vec& xhat, const Vec& y_t);

}  // namespace gss
