#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gss/expr.hpp"
#include "gss/linalg.hpp"

namespace gss {

/// ‖∇f‖ below this is treated as a critical point of f.
inline constexpr double kRegularityFloor = 1e-8;

struct SurfaceJet {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

enum class SurfaceFamily { sphere, ellipsoid, revolution, expression };

/// Hypersurface of revolution about the x0 axis. The meridian curve in the
/// (x0, x1) plane is (a(φ), cos φ), φ ∈ [0, π]; the profile must satisfy
/// a(0) = 0, a′ > 0 on [0, π/2), and be symmetric about φ = π/2. The defining
/// function is f = ‖x⃗‖² − cos²(φ(x0)) with φ(x0) the odd inverse of a.
struct RevolutionProfile {
  explicit RevolutionProfile(const std::string& text);

  std::string text;
  std::shared_ptr<const ExpressionAst> ast;  // in variable `phi`
  double height;                             // a(π/2)

  double a(double phi) const;
  /// (a, a′, a″) at phi.
  std::array<double, 3> derivatives(double phi) const;
};

/// M = f⁻¹(0) ⊂ ℝⁿ⁺¹ for a built-in family or a parsed expression. Immutable;
/// copies share the expression tree.
class DefiningSurface {
 public:
  static DefiningSurface sphere(std::size_t ambient_dim, double radius = 1.0);
  static DefiningSurface ellipsoid(std::vector<double> semiaxes);
  static DefiningSurface revolution(const std::string& profile, std::size_t ambient_dim);
  static DefiningSurface expression(const std::string& text, std::size_t ambient_dim);

  SurfaceFamily family() const noexcept { return family_; }
  std::size_t ambient_dim() const noexcept { return dim_; }
  /// n, the dimension of M.
  std::size_t n() const noexcept { return dim_ - 1; }
  bool sign_normalized() const noexcept { return sign_ < 0; }
  /// Characteristic radius of M.
  double scale() const noexcept { return scale_; }
  const std::vector<double>& semiaxes() const noexcept { return semiaxes_; }
  const RevolutionProfile* profile() const noexcept { return profile_.get(); }
  std::string description() const;

  double value(const Vec& x) const;
  SurfaceJet jet(const Vec& x) const;

  /// The surface defined by −f.
  DefiningSurface negated() const;

 private:
  DefiningSurface() = default;
  SurfaceJet raw_jet(const Vec& x) const;
  double raw_value(const Vec& x) const;
  SurfaceJet revolution_jet(const Vec& x) const;

  SurfaceFamily family_ = SurfaceFamily::sphere;
  std::size_t dim_ = 0;
  double sign_ = 1.0;
  double scale_ = 1.0;
  std::vector<double> semiaxes_;  // sphere: {r}
  std::shared_ptr<const ExpressionAst> ast_;
  std::shared_ptr<const RevolutionProfile> profile_;
};

/// A unit covector on M represented in ambient coordinates.
struct PhasePoint {
  Vec x;
  Vec y;
};

struct ConstraintResiduals {
  double value;    // |f(x)|
  double tangency; // |y·∇f(x)|
  double unit;     // |‖y‖ − 1|
  double max() const { return std::max({value, tangency, unit}); }
};

ConstraintResiduals residuals(const DefiningSurface& surface, const PhasePoint& phase);

// ---------------------------------------------------------------------------
// Sampling

/// First zero of f along the ray t·direction, t > 0, from the origin.
std::optional<Vec> shoot_ray(const DefiningSurface& surface, const Vec& direction);

/// Up to `count` points of M from quasi-random ray directions. Directions with
/// no crossing, or where f cannot be evaluated, are skipped.
std::vector<Vec> sample_surface(const DefiningSurface& surface, std::size_t count);

/// Quasi-random points of the equator N = M ∩ {x0 = 0}.
std::vector<Vec> sample_equator(const DefiningSurface& surface, std::size_t count);

// ---------------------------------------------------------------------------
// Audits. These are sampling certificates: "passed at N samples".

struct SymmetryFinding {
  bool ok = false;
  double max_value_violation = 0.0;  // max |f(x0, x⃗) − f(−x0, x⃗)|
  double max_slope_violation = 0.0;  // max |f₀(0, x⃗)|
  double tolerance = 0.0;
  double strip_halfwidth = 0.0;
  std::size_t samples = 0;
  std::optional<Vec> witness;
};

enum class Definiteness { positive, negative, indefinite };
std::string to_string(Definiteness d);

struct DefinitenessFinding {
  Definiteness kind = Definiteness::indefinite;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  std::size_t samples = 0;
  Vec witness_point;
  Vec witness_vector;
  double witness_eigenvalue = 0.0;
};

struct NormalizedSurface {
  DefinitenessFinding finding;
  DefiningSurface surface;
};

struct AuditReport {
  SymmetryFinding symmetry;
  DefinitenessFinding definiteness;
  double min_curvature = 0.0;
  double max_curvature = 0.0;
  std::optional<Vec> curvature_witness;
  double epsilon_estimate = 0.0;  // > 0 only when definiteness passed
  std::size_t sample_count = 0;
  bool passed() const;
};

/// Default strip for the x0 ↦ −x0 audit: 0.2 × diameter.
double default_strip_halfwidth(const DefiningSurface& surface);

SymmetryFinding audit_symmetry(const DefiningSurface& surface, double strip_halfwidth, std::size_t samples);

/// Classification only; never throws on indefinite Hessians.
DefinitenessFinding classify_definiteness(const DefiningSurface& surface, std::size_t samples);

/// Classification plus f ↦ −f when the Hessian is negative definite.
/// Throws IndefiniteError with the witness point and eigenpair otherwise.
NormalizedSurface audit_definiteness(const DefiningSurface& surface, std::size_t samples);

/// Range of sectional curvature over sampled points (products of principal
/// curvature pairs).
struct CurvatureRange {
  double min = 0.0;
  double max = 0.0;
  std::optional<Vec> min_point;
};
CurvatureRange curvature_range(const DefiningSurface& surface, std::size_t samples);

// ---------------------------------------------------------------------------
// Curvature

/// K(v, w) = (H(v,v)H(w,w) − H(v,w)²) / (‖∇f‖² ‖v∧w‖²), i.e. the Hessian
/// formula for the orthonormalised pair. Exactly symmetric in v and w.
double sectional_curvature(const DefiningSurface& surface, const Vec& x, const Vec& v, const Vec& w);

/// S(v) = P_T(Hess(f) v) / ‖∇f‖, so ⟨S(v), w⟩ = Hess(f)(v, w)/‖∇f‖ for tangent w.
Vec shape_operator(const DefiningSurface& surface, const Vec& x, const Vec& v);

/// Principal curvatures at x (eigenvalues of the shape operator), ascending.
Vec principal_curvatures(const DefiningSurface& surface, const Vec& x);

// ---------------------------------------------------------------------------
// Projection

struct ProjectionOptions {
  double value_tolerance = 1e-12;
  int max_newton_steps = 50;
};

/// Newton along ∇f until |f| < value_tolerance, then y is projected to the
/// tangent space and normalised.
PhasePoint project_to_surface(const DefiningSurface& surface, const Vec& x_raw, const Vec& y_raw,
                              const ProjectionOptions& options = {});

/// Position-only Newton projection.
Vec project_point(const DefiningSurface& surface, const Vec& x_raw, const ProjectionOptions& options = {});

}  // namespace gss
