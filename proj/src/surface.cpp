#include "gss/surface.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gss/error.hpp"
#include "gss/sampling.hpp"

namespace gss {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Revolution surfaces are evaluated away from the two poles x⃗ = 0, where the
// inverse of the profile is singular.
constexpr double kPoleGuard = 1e-3;

std::string format_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ')';
  return os.str();
}

/// First zero of f on origin + t·u, t > 0. Marches in steps of scale/8 to
/// avoid skipping a pair of crossings, then doubles.
std::optional<Vec> line_root(const DefiningSurface& s, const Vec& origin, const Vec& u) {
  try {
    const double f_origin = s.value(origin);
    if (f_origin == 0.0) return std::nullopt;
    const double step = s.scale() / 8.0;
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    for (int k = 1; k <= 64 && !bracketed; ++k) {
      hi = k * step;
      if (std::signbit(s.value(origin + hi * u)) != std::signbit(f_origin)) bracketed = true;
      else lo = hi;
    }
    for (int k = 0; k < 12 && !bracketed; ++k) {
      hi *= 2.0;
      if (std::signbit(s.value(origin + hi * u)) != std::signbit(f_origin)) bracketed = true;
      else lo = hi;
    }
    if (!bracketed) return std::nullopt;
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (std::signbit(s.value(origin + mid * u)) == std::signbit(f_origin)) lo = mid;
      else hi = mid;
    }
    double t = 0.5 * (lo + hi);
    double ft = std::abs(s.value(origin + t * u));
    for (int k = 0; k < 3; ++k) {
      const SurfaceJet j = s.jet(origin + t * u);
      const double slope = j.grad.dot(u);
      if (slope == 0.0) break;
      const double cand = t - j.value / slope;
      const double fc = std::abs(s.value(origin + cand * u));
      if (!(fc < ft)) break;
      t = cand;
      ft = fc;
    }
    return Vec(origin + t * u);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void require_regular(const SurfaceJet& j, const Vec& x) {
  if (!(j.grad.norm() >= kRegularityFloor))
    throw Error(ErrorKind::regularity, "‖∇f‖ = " + std::to_string(j.grad.norm()) + " at " + format_vec(x));
}

Mat tangent_basis(const Vec& grad) {
  Mat row(1, grad.size());
  row.row(0) = grad.transpose();
  return orthonormal_null_space(row);
}

}  // namespace

// ---------------------------------------------------------------------------
// RevolutionProfile

RevolutionProfile::RevolutionProfile(const std::string& profile_text)
    : text(profile_text),
      ast(std::make_shared<const ExpressionAst>(parse_expression(profile_text, std::vector<std::string>{"phi"}))),
      height(0.0) {
  height = a(kHalfPi);
  if (std::abs(a(0.0)) > 1e-12)
    throw Error(ErrorKind::domain, "revolution profile must satisfy a(0) = 0: " + text);
}

double RevolutionProfile::a(double phi) const { return ast->evaluate(std::span<const double>(&phi, 1)); }

std::array<double, 3> RevolutionProfile::derivatives(double phi) const {
  const JetValue j = ast->jet(std::span<const double>(&phi, 1));
  return {j.value(), j.grad(0), j.hess(0, 0)};
}

// ---------------------------------------------------------------------------
// DefiningSurface

DefiningSurface DefiningSurface::sphere(std::size_t ambient_dim, double radius) {
  if (ambient_dim < 3) throw Error(ErrorKind::dimension_mismatch, "sphere needs ambient dimension >= 3");
  if (!(radius > 0.0)) throw Error(ErrorKind::domain, "sphere radius must be positive");
  DefiningSurface s;
  s.family_ = SurfaceFamily::sphere;
  s.dim_ = ambient_dim;
  s.scale_ = radius;
  s.semiaxes_ = {radius};
  return s;
}

DefiningSurface DefiningSurface::ellipsoid(std::vector<double> semiaxes) {
  if (semiaxes.size() < 3) throw Error(ErrorKind::dimension_mismatch, "ellipsoid needs at least 3 semiaxes");
  for (double a : semiaxes)
    if (!(a > 0.0)) throw Error(ErrorKind::domain, "ellipsoid semiaxes must be positive");
  DefiningSurface s;
  s.family_ = SurfaceFamily::ellipsoid;
  s.dim_ = semiaxes.size();
  s.scale_ = *std::max_element(semiaxes.begin(), semiaxes.end());
  s.semiaxes_ = std::move(semiaxes);
  return s;
}

DefiningSurface DefiningSurface::revolution(const std::string& profile, std::size_t ambient_dim) {
  if (ambient_dim < 3) throw Error(ErrorKind::dimension_mismatch, "revolution surface needs ambient dimension >= 3");
  DefiningSurface s;
  s.family_ = SurfaceFamily::revolution;
  s.dim_ = ambient_dim;
  s.profile_ = std::make_shared<const RevolutionProfile>(profile);
  if (!(s.profile_->height > 0.0))
    throw Error(ErrorKind::domain, "revolution profile must have a(pi/2) > 0: " + profile);
  s.scale_ = std::max(1.0, s.profile_->height);
  return s;
}

DefiningSurface DefiningSurface::expression(const std::string& text, std::size_t ambient_dim) {
  if (ambient_dim < 3) throw Error(ErrorKind::dimension_mismatch, "expression surface needs ambient dimension >= 3");
  DefiningSurface s;
  s.family_ = SurfaceFamily::expression;
  s.dim_ = ambient_dim;
  s.ast_ = std::make_shared<const ExpressionAst>(parse_expression(text, ambient_dim));
  if (s.ast_->is_constant()) throw Error(ErrorKind::regularity, "constant defining function has no regular zero set");
  double radius = 0.0;
  for (std::size_t i = 0; i < ambient_dim; ++i)
    for (double sign : {1.0, -1.0}) {
      Vec u = Vec::Zero(static_cast<Eigen::Index>(ambient_dim));
      u(static_cast<Eigen::Index>(i)) = sign;
      if (auto hit = line_root(s, Vec::Zero(static_cast<Eigen::Index>(ambient_dim)), u))
        radius = std::max(radius, hit->norm());
    }
  if (radius > 0.0) s.scale_ = radius;
  return s;
}

std::string DefiningSurface::description() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case SurfaceFamily::sphere: os << "sphere(r=" << semiaxes_[0] << ", dim=" << dim_ << ")"; break;
    case SurfaceFamily::ellipsoid:
      os << "ellipsoid(";
      for (std::size_t i = 0; i < semiaxes_.size(); ++i) os << (i ? "," : "") << semiaxes_[i];
      os << ")";
      break;
    case SurfaceFamily::revolution: os << "revolution(" << profile_->text << ", dim=" << dim_ << ")"; break;
    case SurfaceFamily::expression: os << "expression(" << ast_->to_string() << ")"; break;
  }
  if (sign_ < 0) os << " [negated]";
  return os.str();
}

DefiningSurface DefiningSurface::negated() const {
  DefiningSurface s = *this;
  s.sign_ = -s.sign_;
  return s;
}

double DefiningSurface::value(const Vec& x) const { return sign_ * raw_value(x); }

SurfaceJet DefiningSurface::jet(const Vec& x) const {
  SurfaceJet j = raw_jet(x);
  if (sign_ < 0) {
    j.value = -j.value;
    j.grad = -j.grad;
    j.hess = -j.hess;
  }
  return j;
}

double DefiningSurface::raw_value(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_)
    throw Error(ErrorKind::dimension_mismatch, "point dimension " + std::to_string(x.size()));
  switch (family_) {
    case SurfaceFamily::sphere: return x.squaredNorm() - semiaxes_[0] * semiaxes_[0];
    case SurfaceFamily::ellipsoid: {
      double v = -1.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double q = x(static_cast<Eigen::Index>(i)) / semiaxes_[i];
        v += q * q;
      }
      return v;
    }
    case SurfaceFamily::revolution: return revolution_jet(x).value;
    case SurfaceFamily::expression:
      return ast_->evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
  return 0.0;
}

SurfaceJet DefiningSurface::raw_jet(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_)
    throw Error(ErrorKind::dimension_mismatch, "point dimension " + std::to_string(x.size()));
  const auto n = static_cast<Eigen::Index>(dim_);
  SurfaceJet j;
  switch (family_) {
    case SurfaceFamily::sphere:
      j.value = raw_value(x);
      j.grad = 2.0 * x;
      j.hess = 2.0 * Mat::Identity(n, n);
      return j;
    case SurfaceFamily::ellipsoid: {
      j.value = raw_value(x);
      j.grad.resize(n);
      j.hess = Mat::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double inv = 1.0 / (semiaxes_[static_cast<std::size_t>(i)] * semiaxes_[static_cast<std::size_t>(i)]);
        j.grad(i) = 2.0 * x(i) * inv;
        j.hess(i, i) = 2.0 * inv;
      }
      return j;
    }
    case SurfaceFamily::revolution: return revolution_jet(x);
    case SurfaceFamily::expression: {
      const JetValue jv = ast_->jet(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
      j.value = jv.value();
      j.grad = jv.gradient();
      j.hess = jv.hessian();
      return j;
    }
  }
  return j;
}

SurfaceJet DefiningSurface::revolution_jet(const Vec& x) const {
  const RevolutionProfile& p = *profile_;
  const double h = std::abs(x(0));
  if (h >= p.height) throw Error(ErrorKind::domain, "x0 beyond the pole of the revolution profile");
  // Safeguarded Newton for a(φ) = h on [0, π/2].
  double lo = 0.0, hi = kHalfPi;
  double phi = kHalfPi * h / p.height;
  for (int k = 0; k < 100; ++k) {
    const auto d = p.derivatives(phi);
    const double g = d[0] - h;
    if (g > 0.0) hi = phi;
    else lo = phi;
    double next = d[1] > 0.0 ? phi - g / d[1] : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - phi) <= 1e-16 * kHalfPi || hi - lo <= 1e-16;
    phi = next;
    if (done) break;
  }
  const double c = std::cos(phi);
  if (c < kPoleGuard) throw Error(ErrorKind::regularity, "point inside the pole cap of the revolution surface");
  const double sign = x(0) < 0.0 ? -1.0 : 1.0;
  const auto d = p.derivatives(phi);
  const double s = sign * std::sin(phi);
  const double a1 = d[1];         // a′ is even in φ
  const double a2 = sign * d[2];  // a″ is odd in φ
  const double rho = c * c;
  const double rho1 = -2.0 * s * c / a1;
  const double rho2 = -2.0 * ((c * c - s * s) * a1 - s * c * a2) / (a1 * a1 * a1);

  const auto n = static_cast<Eigen::Index>(dim_);
  SurfaceJet j;
  j.value = x.tail(n - 1).squaredNorm() - rho;
  j.grad.resize(n);
  j.grad(0) = -rho1;
  j.grad.tail(n - 1) = 2.0 * x.tail(n - 1);
  j.hess = 2.0 * Mat::Identity(n, n);
  j.hess(0, 0) = -rho2;
  return j;
}

ConstraintResiduals residuals(const DefiningSurface& surface, const PhasePoint& phase) {
  const SurfaceJet j = surface.jet(phase.x);
  return {std::abs(j.value), std::abs(phase.y.dot(j.grad)), std::abs(phase.y.norm() - 1.0)};
}

// ---------------------------------------------------------------------------
// Sampling

std::optional<Vec> shoot_ray(const DefiningSurface& surface, const Vec& direction) {
  const double norm = direction.norm();
  if (norm == 0.0) return std::nullopt;
  return line_root(surface, Vec::Zero(direction.size()), direction / norm);
}

std::vector<Vec> sample_surface(const DefiningSurface& surface, std::size_t count) {
  std::vector<Vec> out;
  out.reserve(count);
  Halton seq(surface.ambient_dim());
  for (std::size_t attempt = 0; out.size() < count && attempt < 4 * count + 16; ++attempt)
    if (auto p = shoot_ray(surface, halton_direction(seq.next()))) out.push_back(std::move(*p));
  return out;
}

std::vector<Vec> sample_equator(const DefiningSurface& surface, std::size_t count) {
  std::vector<Vec> out;
  out.reserve(count);
  const auto n = static_cast<Eigen::Index>(surface.ambient_dim());
  Halton seq(surface.n());
  for (std::size_t attempt = 0; out.size() < count && attempt < 4 * count + 16; ++attempt) {
    Vec u = Vec::Zero(n);
    u.tail(n - 1) = halton_direction(seq.next());
    if (auto p = shoot_ray(surface, u)) out.push_back(std::move(*p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audits

std::string to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive: return "positive";
    case Definiteness::negative: return "negative";
    case Definiteness::indefinite: return "indefinite";
  }
  return "indefinite";
}

bool AuditReport::passed() const {
  return symmetry.ok && definiteness.kind != Definiteness::indefinite && min_curvature > 0.0 &&
         epsilon_estimate > 0.0;
}

double default_strip_halfwidth(const DefiningSurface& surface) {
  double reach = 0.0;
  if (auto top = shoot_ray(surface, Vec::Unit(static_cast<Eigen::Index>(surface.ambient_dim()), 0)))
    reach = top->norm();
  if (auto bottom = shoot_ray(surface, -Vec::Unit(static_cast<Eigen::Index>(surface.ambient_dim()), 0)))
    reach += bottom->norm();
  if (reach == 0.0) reach = 2.0 * surface.scale();
  return 0.2 * reach;
}

SymmetryFinding audit_symmetry(const DefiningSurface& surface, double strip_halfwidth, std::size_t samples) {
  if (!(strip_halfwidth > 0.0)) throw Error(ErrorKind::config, "strip_halfwidth must be positive");
  const auto n = static_cast<Eigen::Index>(surface.ambient_dim());
  SymmetryFinding out;
  out.strip_halfwidth = strip_halfwidth;
  double worst = -1.0;
  double grad_scale = 0.0;

  Halton seq(surface.ambient_dim());
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec h = seq.next();
    Vec origin = Vec::Zero(n);
    origin(0) = strip_halfwidth * (2.0 * h(0) - 1.0);
    Vec u = Vec::Zero(n);
    u.tail(n - 1) = halton_direction(h.tail(n - 1));
    auto x = line_root(surface, origin, u);
    if (!x) continue;
    const SurfaceJet j = surface.jet(*x);
    require_regular(j, *x);
    grad_scale = std::max(grad_scale, j.grad.norm());
    Vec mirrored = *x;
    mirrored(0) = -mirrored(0);
    const double v = std::abs(j.value - surface.value(mirrored));
    out.max_value_violation = std::max(out.max_value_violation, v);
    ++out.samples;
    if (v > worst) {
      worst = v;
      out.witness = *x;
    }
  }
  for (const Vec& x : sample_equator(surface, samples)) {
    const SurfaceJet j = surface.jet(x);
    require_regular(j, x);
    grad_scale = std::max(grad_scale, j.grad.norm());
    const double v = std::abs(j.grad(0));
    out.max_slope_violation = std::max(out.max_slope_violation, v);
    ++out.samples;
    if (v > worst) {
      worst = v;
      out.witness = x;
    }
  }
  out.tolerance = 1e-10 * std::max(1.0, grad_scale * surface.scale());
  out.ok = out.samples > 0 && out.max_value_violation < out.tolerance && out.max_slope_violation < out.tolerance;
  if (out.ok) out.witness.reset();
  return out;
}

DefinitenessFinding classify_definiteness(const DefiningSurface& surface, std::size_t samples) {
  DefinitenessFinding out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  out.max_eigenvalue = -std::numeric_limits<double>::infinity();
  Vec min_point, min_vector, max_point, max_vector;
  double hess_scale = 0.0;
  for (const Vec& x : sample_surface(surface, samples)) {
    const SurfaceJet j = surface.jet(x);
    require_regular(j, x);
    const SymmetricEigen eig = jacobi_eigen(j.hess);
    hess_scale = std::max(hess_scale, j.hess.cwiseAbs().maxCoeff());
    const auto last = eig.values.size() - 1;
    if (eig.values(0) < out.min_eigenvalue) {
      out.min_eigenvalue = eig.values(0);
      min_point = x;
      min_vector = eig.vectors.col(0);
    }
    if (eig.values(last) > out.max_eigenvalue) {
      out.max_eigenvalue = eig.values(last);
      max_point = x;
      max_vector = eig.vectors.col(last);
    }
    ++out.samples;
  }
  if (out.samples == 0) throw Error(ErrorKind::regularity, "no surface samples found by ray shooting");
  const double tol = 1e-12 * std::max(hess_scale, 1e-300);
  if (out.min_eigenvalue > tol) {
    out.kind = Definiteness::positive;
  } else if (out.max_eigenvalue < -tol) {
    out.kind = Definiteness::negative;
  } else {
    out.kind = Definiteness::indefinite;
  }
  // Witness: the extreme eigenpair whose sign breaks the majority sign.
  const bool mostly_positive = out.max_eigenvalue > -out.min_eigenvalue;
  if (out.kind == Definiteness::negative || (out.kind == Definiteness::indefinite && !mostly_positive)) {
    out.witness_point = max_point;
    out.witness_vector = max_vector;
    out.witness_eigenvalue = out.max_eigenvalue;
  } else {
    out.witness_point = min_point;
    out.witness_vector = min_vector;
    out.witness_eigenvalue = out.min_eigenvalue;
  }
  return out;
}

NormalizedSurface audit_definiteness(const DefiningSurface& surface, std::size_t samples) {
  DefinitenessFinding finding = classify_definiteness(surface, samples);
  switch (finding.kind) {
    case Definiteness::positive: return {finding, surface};
    case Definiteness::negative: return {finding, surface.negated()};
    case Definiteness::indefinite: break;
  }
  std::ostringstream os;
  os.precision(17);
  os << "Hessian is indefinite; witness point " << format_vec(finding.witness_point) << ", eigenvalue "
     << finding.witness_eigenvalue << ", eigenvector " << format_vec(finding.witness_vector);
  throw Error(ErrorKind::indefinite, os.str());
}

CurvatureRange curvature_range(const DefiningSurface& surface, std::size_t samples) {
  CurvatureRange out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), {}};
  for (const Vec& x : sample_surface(surface, samples)) {
    const Vec k = principal_curvatures(surface, x);
    for (Eigen::Index i = 0; i < k.size(); ++i)
      for (Eigen::Index m = i + 1; m < k.size(); ++m) {
        const double prod = k(i) * k(m);
        if (prod < out.min) {
          out.min = prod;
          out.min_point = x;
        }
        out.max = std::max(out.max, prod);
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature

double sectional_curvature(const DefiningSurface& surface, const Vec& x, const Vec& v, const Vec& w) {
  const SurfaceJet j = surface.jet(x);
  require_regular(j, x);
  const double vv = v.squaredNorm(), ww = w.squaredNorm(), vw = 0.5 * (v.dot(w) + w.dot(v));
  const double wedge2 = vv * ww - vw * vw;
  if (!(wedge2 > 1e-20 * vv * ww)) throw Error(ErrorKind::degenerate_plane, "tangent vectors are parallel");
  const double hvv = bilinear(j.hess, v, v), hww = bilinear(j.hess, w, w), hvw = bilinear(j.hess, v, w);
  return (hvv * hww - hvw * hvw) / (j.grad.squaredNorm() * wedge2);
}

Vec shape_operator(const DefiningSurface& surface, const Vec& x, const Vec& v) {
  const SurfaceJet j = surface.jet(x);
  require_regular(j, x);
  const double g = j.grad.norm();
  const Vec nu = j.grad / g;
  Vec hv = j.hess * v;
  hv -= hv.dot(nu) * nu;
  return hv / g;
}

Vec principal_curvatures(const DefiningSurface& surface, const Vec& x) {
  const SurfaceJet j = surface.jet(x);
  require_regular(j, x);
  const Mat t = tangent_basis(j.grad);
  Mat s = t.transpose() * j.hess * t / j.grad.norm();
  s = 0.5 * (s + s.transpose()).eval();
  return jacobi_eigen(s).values;
}

// ---------------------------------------------------------------------------
// Projection

Vec project_point(const DefiningSurface& surface, const Vec& x_raw, const ProjectionOptions& options) {
  Vec x = x_raw;
  SurfaceJet j = surface.jet(x);
  int steps = 0;
  while (std::abs(j.value) >= options.value_tolerance) {
    if (++steps > options.max_newton_steps)
      throw Error(ErrorKind::projection_diverged, "Newton projection did not converge from " + format_vec(x_raw));
    if (!(j.grad.norm() >= kRegularityFloor))
      throw Error(ErrorKind::projection_diverged,
                  "Newton projection reached a critical point of f at " + format_vec(x) + " from " + format_vec(x_raw));
    // Damped Newton along ∇f; |f| never increases.
    double lambda = 1.0;
    Vec candidate;
    double fc = 0.0;
    for (int halvings = 0;; ++halvings) {
      candidate = x - lambda * (j.value / j.grad.squaredNorm()) * j.grad;
      try {
        fc = surface.value(candidate);
      } catch (const Error&) {
        fc = std::numeric_limits<double>::infinity();
      }
      if (std::abs(fc) < std::abs(j.value)) break;
      if (halvings == 30)
        throw Error(ErrorKind::projection_diverged, "Newton projection stalled from " + format_vec(x_raw));
      lambda *= 0.5;
    }
    x = candidate;
    j = surface.jet(x);
  }
  // One polishing step, kept only if it strictly reduces |f|.
  if (j.value != 0.0 && j.grad.squaredNorm() > 0.0) {
    const Vec candidate = x - (j.value / j.grad.squaredNorm()) * j.grad;
    if (std::abs(surface.value(candidate)) < std::abs(j.value)) x = candidate;
  }
  return x;
}

PhasePoint project_to_surface(const DefiningSurface& surface, const Vec& x_raw, const Vec& y_raw,
                              const ProjectionOptions& options) {
  PhasePoint p;
  p.x = project_point(surface, x_raw, options);
  const SurfaceJet j = surface.jet(p.x);
  require_regular(j, p.x);
  const Vec nu = j.grad / j.grad.norm();
  Vec y = y_raw - y_raw.dot(nu) * nu;
  const double norm = y.norm();
  if (!(norm >= 1e-8)) throw Error(ErrorKind::zero_covector, "covector is normal to the surface");
  y /= norm;
  y -= y.dot(nu) * nu;
  p.y = y / y.norm();
  return p;
}

}  // namespace gss
