#include "gss/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gss/error.hpp"
#include "gss/quadrature.hpp"

namespace gss {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// ∫₀^φ g(θ) dθ for g π-periodic and even about π/2 (functions of sin²θ).
template <class Integrand>
double quarter_reduced(const Integrand& g, double phi) {
  auto piece = [&](double upper) {
    if (upper == 0.0) return 0.0;
    const QuadratureResult r = integrate(g, 0.0, upper, 1e-14, 1e-13);
    if (!r.converged) {
      std::ostringstream os;
      os << "elliptic quadrature error estimate " << r.error;
      throw Error(ErrorKind::quadrature_failure, os.str());
    }
    return r.value;
  };
  const double sign = phi < 0.0 ? -1.0 : 1.0;
  const double a = std::abs(phi);
  const double quarters = std::floor(a / kHalfPi);
  const double rest = a - quarters * kHalfPi;
  if (quarters == 0.0) return sign * piece(a);
  const double q = piece(kHalfPi);
  const bool even = std::fmod(quarters, 2.0) == 0.0;
  const double tail = even ? piece(rest) : q - piece(kHalfPi - rest);
  return sign * (quarters * q + tail);
}

void check_parameter(double c, double phi, const char* what) {
  const double s = std::abs(phi) >= kHalfPi ? 1.0 : std::sin(phi) * std::sin(phi);
  if (!(1.0 - c * s > 0.0)) {
    std::ostringstream os;
    os << what << " = " << c << " makes the integrand singular for amplitude " << phi;
    throw Error(ErrorKind::domain, os.str());
  }
}

}  // namespace

double elliptic_f(const EllipticArgs& args) {
  check_parameter(args.m, args.phi, "m");
  const double m = args.m;
  return quarter_reduced([m](double th) { return 1.0 / std::sqrt(1.0 - m * std::sin(th) * std::sin(th)); },
                         args.phi);
}

double elliptic_pi(const EllipticArgs& args) {
  check_parameter(args.m, args.phi, "m");
  check_parameter(args.n, args.phi, "n");
  const double m = args.m, n = args.n;
  return quarter_reduced(
      [m, n](double th) {
        const double s2 = std::sin(th) * std::sin(th);
        return 1.0 / ((1.0 - n * s2) * std::sqrt(1.0 - m * s2));
      },
      args.phi);
}

double ellipsoid_g(double t, double a0) {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::domain, "ellipsoid_g needs t in (0, 1]");
  if (!(a0 > 0.0)) throw Error(ErrorKind::domain, "ellipsoid_g needs a0 > 0");
  const double m = -(1.0 - a0 * a0) * (1.0 - t * t) / (a0 * a0);
  const double n = 1.0 - t * t;
  return -(t * (1.0 - a0 * a0) / a0) * elliptic_f({kTwoPi, m, 0.0}) + (t / a0) * elliptic_pi({kTwoPi, m, n});
}

double clairaut_g(double t, const RevolutionProfile& profile) {
  if (!(t >= 1e-3 && t <= 1.0)) throw Error(ErrorKind::domain, "clairaut_g needs t in [1e-3, 1]");
  const double k = 1.0 - t * t;
  const double rk = std::sqrt(k);
  auto integrand = [&](double sigma) {
    const double s = std::sin(sigma);
    const double phi = std::asin(std::clamp(rk * s, -1.0, 1.0));
    const double da = profile.derivatives(phi)[1];
    return std::sqrt(k * s * s + da * da) / (1.0 - k * s * s);
  };
  double total = 0.0, error = 0.0;
  for (int q = 0; q < 4; ++q) {
    const QuadratureResult r = integrate(integrand, q * kHalfPi, (q + 1) * kHalfPi, 1e-12, 1e-14);
    total += r.value;
    error += r.error;
  }
  if (!(error <= 1e-9)) {
    std::ostringstream os;
    os << "Clairaut quadrature reached error estimate " << error;
    throw Error(ErrorKind::quadrature_failure, os.str());
  }
  return t * total;
}

double billiard_g(double t) {
  if (!(t >= 0.0 && t <= 1.0 + 1e-12)) throw Error(ErrorKind::domain, "billiard_g needs t in [0, 1]");
  return 4.0 * std::acos(std::min(t, 1.0));
}

PagePoint closed_form_return_map(const Vec& xhat, double y0, const Vec& yvec, double g_value) {
  const double t = yvec.norm();
  if (t == 0.0) throw Error(ErrorKind::pole_point, "y⃗ = 0: the rotation plane is undefined");
  const Vec u = yvec / t;
  const double c = std::cos(g_value), s = std::sin(g_value);
  return {xhat * c + u * s, y0, yvec * c - t * xhat * s};
}

double closed_form_angle(const DefiningSurface& surface, double t) {
  switch (surface.family()) {
    case SurfaceFamily::sphere: return kTwoPi;
    case SurfaceFamily::ellipsoid: {
      const auto& a = surface.semiaxes();
      for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] != 1.0)
          throw Error(ErrorKind::unsupported_surface, "closed form needs ellipsoid semiaxes (a0, 1, ..., 1)");
      return ellipsoid_g(t, a[0]);
    }
    case SurfaceFamily::revolution: return clairaut_g(t, *surface.profile());
    case SurfaceFamily::expression: break;
  }
  throw Error(ErrorKind::unsupported_surface, "no closed-form return map for " + surface.description());
}

PhasePoint closed_form_return(const DefiningSurface& surface, const PhasePoint& start) {
  const auto n = static_cast<Eigen::Index>(surface.ambient_dim()) - 1;
  const Vec xvec = start.x.tail(n);
  const Vec yvec = start.y.tail(n);
  const double t = yvec.norm();
  if (t <= 1e-15) return start;  // meridian through both poles closes up
  const double g = closed_form_angle(surface, t);
  const double radius = xvec.norm();
  const PagePoint r = closed_form_return_map(xvec / radius, start.y(0), yvec, g);
  PhasePoint out;
  out.x = Vec::Zero(n + 1);
  out.y = Vec::Zero(n + 1);
  out.x.tail(n) = radius * r.xhat;
  out.y(0) = r.y0;
  out.y.tail(n) = r.yvec;
  return out;
}

BilliardPoint billiard_second_iterate(const Vec& xhat, const Vec& y_t) {
  const double t = y_t.norm();
  if (!(t <= 1.0 + 1e-12)) throw Error(ErrorKind::domain, "‖y_T‖ must not exceed 1");
  if (t == 0.0) return {xhat, y_t};
  const PagePoint r = closed_form_return_map(xhat, 0.0, y_t, billiard_g(t));
  return {r.xhat, r.yvec};
}

}  // namespace gss
