#include <doctest.h>

#include <cmath>

#include "gss/error.hpp"
#include "gss/sampling.hpp"
#include "gss/surface.hpp"

using namespace gss;

namespace {

Vec v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

const DefiningSurface& ellipsoid211() {
  static const DefiningSurface s = DefiningSurface::ellipsoid({2, 1, 1});
  return s;
}

}  // namespace

TEST_CASE("audit_symmetry") {
  SUBCASE("ellipsoid(2,1,1) passes with zero violation") {
    const auto f = audit_symmetry(ellipsoid211(), default_strip_halfwidth(ellipsoid211()), 512);
    CHECK(f.ok);
    CHECK(f.max_value_violation == 0.0);
    CHECK(f.max_slope_violation == 0.0);
    CHECK(f.samples > 500);
    CHECK(f.strip_halfwidth == doctest::Approx(0.8));
  }
  SUBCASE("cubic in x0 fails with a witness") {
    const auto s = DefiningSurface::expression("x0^3 + x1^2 + x2^2 - 1", 3);
    const auto f = audit_symmetry(s, 0.2, 256);
    CHECK_FALSE(f.ok);
    REQUIRE(f.witness.has_value());
    // f(x0) − f(−x0) = 2x0³ at the witness.
    const double x0 = (*f.witness)(0);
    CHECK(f.max_value_violation == doctest::Approx(2.0 * std::abs(x0 * x0 * x0)));
    CHECK(std::abs(x0) <= 0.2);
  }
  SUBCASE("sphere passes") {
    CHECK(audit_symmetry(DefiningSurface::sphere(3), 0.4, 256).ok);
  }
  SUBCASE("odd slope at the equator is caught") {
    const auto s = DefiningSurface::expression("x0^2 + x1^2 + x2^2 + 0.1*x0*x1 - 1", 3);
    const auto f = audit_symmetry(s, 0.2, 256);
    CHECK_FALSE(f.ok);
    CHECK(f.max_slope_violation > 0.05);
  }
}

TEST_CASE("audit_definiteness") {
  SUBCASE("ellipsoid(2,1,1) is positive definite, min eigenvalue 1/2") {
    const auto r = audit_definiteness(ellipsoid211(), 256);
    CHECK(r.finding.kind == Definiteness::positive);
    CHECK(r.finding.min_eigenvalue == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_FALSE(r.surface.sign_normalized());
  }
  SUBCASE("negated sphere is normalised") {
    const auto s = DefiningSurface::expression("-(x0^2 + x1^2 + x2^2 - 1)", 3);
    const auto r = audit_definiteness(s, 256);
    CHECK(r.finding.kind == Definiteness::negative);
    CHECK(r.surface.sign_normalized());
    CHECK(r.surface.value(v3(2, 0, 0)) == doctest::Approx(3.0));
    CHECK(classify_definiteness(r.surface, 64).kind == Definiteness::positive);
  }
  SUBCASE("torus-like quartic is indefinite with a witness eigenpair") {
    const auto s = DefiningSurface::expression("((x0^2+x1^2+x2^2)+3)^2 - 16*(x1^2+x2^2)", 3);
    const auto c = classify_definiteness(s, 256);
    CHECK(c.kind == Definiteness::indefinite);
    REQUIRE(c.witness_point.size() == 3);
    // Witness eigenpair is a genuine eigenpair of the Hessian at the witness point.
    const Mat h = s.jet(c.witness_point).hess;
    CHECK((h * c.witness_vector - c.witness_eigenvalue * c.witness_vector).norm() < 1e-9);
    CHECK(c.min_eigenvalue < 0.0);
    CHECK(c.max_eigenvalue > 0.0);
    CHECK_THROWS_AS(audit_definiteness(s, 256), Error);
    try {
      audit_definiteness(s, 256);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::indefinite);
      CHECK(std::string(e.what()).find("witness point") != std::string::npos);
    }
  }
}

TEST_CASE("built-in families classify as their constant Hessians say") {
  for (const auto& s : {DefiningSurface::sphere(3, 0.5), DefiningSurface::sphere(4, 3.0),
                        DefiningSurface::ellipsoid({0.5, 1, 1}), DefiningSurface::ellipsoid({2, 1, 1, 1}),
                        DefiningSurface::ellipsoid({1, 2, 3})}) {
    CAPTURE(s.description());
    const auto c = classify_definiteness(s, 128);
    CHECK(c.kind == Definiteness::positive);
    double expected = 1e300;
    if (s.family() == SurfaceFamily::sphere) expected = 2.0;
    else
      for (double a : s.semiaxes()) expected = std::min(expected, 2.0 / (a * a));
    CHECK(c.min_eigenvalue == doctest::Approx(expected).epsilon(1e-12));
    CHECK(curvature_range(s, 128).min > 0.0);
  }
}

TEST_CASE("sectional_curvature") {
  SUBCASE("unit sphere: K = 1 on any plane") {
    const auto s = DefiningSurface::sphere(3);
    CHECK(sectional_curvature(s, v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)) == doctest::Approx(1.0).epsilon(1e-15));
    const Vec x = v3(1, 1, 1).normalized();
    CHECK(sectional_curvature(s, x, v3(1, -1, 0), v3(1, 1, -2)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("sphere(r): K = 1/r²") {
    for (double r : {0.5, 1.0, 3.0}) {
      const auto s = DefiningSurface::sphere(4, r);
      const Vec x = r * Eigen::Vector4d(0, 0, 1, 0);
      const double k = sectional_curvature(s, x, Eigen::Vector4d(1, 0, 0, 0), Eigen::Vector4d(0, 1, 0, 1));
      CHECK(k == doctest::Approx(1.0 / (r * r)).epsilon(1e-14));
    }
  }
  SUBCASE("ellipsoid(2,1,1) at (0,1,0), plane (e0, e2): 1/4") {
    CHECK(sectional_curvature(ellipsoid211(), v3(0, 1, 0), v3(1, 0, 0), v3(0, 0, 1)) ==
          doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("symmetric and basis independent") {
    const auto s = DefiningSurface::ellipsoid({2, 1.5, 1, 0.7});
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
      const Vec x = *shoot_ray(s, rng.unit_vector(4));
      const Vec n = s.jet(x).grad.normalized();
      Vec v = rng.unit_vector(4), w = rng.unit_vector(4);
      v -= v.dot(n) * n;
      w -= w.dot(n) * n;
      const double kvw = sectional_curvature(s, x, v, w);
      CHECK(kvw == sectional_curvature(s, x, w, v));
      const double c = std::cos(0.7), si = std::sin(0.7);
      const Vec v2 = c * v + si * w, w2 = -si * v + 3.0 * c * w;
      CHECK(sectional_curvature(s, x, v2, w2) == doctest::Approx(kvw).epsilon(1e-10));
    }
  }
  SUBCASE("parallel vectors are a degenerate plane") {
    CHECK_THROWS_AS(sectional_curvature(ellipsoid211(), v3(0, 1, 0), v3(1, 0, 0), v3(2, 0, 0)), Error);
  }
}

TEST_CASE("shape_operator") {
  const auto unit = DefiningSurface::sphere(3);
  CHECK(shape_operator(unit, v3(1, 0, 0), v3(0, 1, 0)).isApprox(v3(0, 1, 0), 1e-15));
  const auto big = DefiningSurface::sphere(3, 3.0);
  CHECK(shape_operator(big, v3(0, 0, 3), v3(0.3, -0.6, 0)).isApprox(v3(0.1, -0.2, 0), 1e-15));
  CHECK(shape_operator(ellipsoid211(), v3(0, 1, 0), v3(1, 0, 0)).isApprox(v3(0.25, 0, 0), 1e-15));
}

TEST_CASE("project_to_surface") {
  const auto unit = DefiningSurface::sphere(3);
  SUBCASE("radial projection and normalisation") {
    const PhasePoint p = project_to_surface(unit, v3(1.1, 0, 0), v3(0, 2, 0));
    CHECK((p.x - v3(1, 0, 0)).norm() < 1e-14);
    CHECK((p.y - v3(0, 1, 0)).norm() < 1e-14);
  }
  SUBCASE("ellipsoid from (0,1.05,0): constraints to 1e-12") {
    const PhasePoint p = project_to_surface(ellipsoid211(), v3(0, 1.05, 0), v3(1, 0.1, 0));
    const auto r = residuals(ellipsoid211(), p);
    CHECK(r.value < 1e-12);
    CHECK(r.tangency < 1e-12);
    CHECK(r.unit < 1e-12);
  }
  SUBCASE("idempotent and never increases |f|") {
    Rng rng(5);
    const auto s = DefiningSurface::expression("x0^2/4 + x1^2 + x2^2 + 0.1*x1^4 - 1", 3);
    for (int k = 0; k < 100; ++k) {
      const Vec x = *shoot_ray(s, rng.unit_vector(3)) + 0.05 * rng.unit_vector(3);
      const Vec y = rng.unit_vector(3);
      const PhasePoint p = project_to_surface(s, x, y);
      CHECK(std::abs(s.value(p.x)) <= std::abs(s.value(x)));
      const PhasePoint q = project_to_surface(s, p.x, p.y);
      CHECK((q.x - p.x).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((q.y - p.y).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  SUBCASE("normal covector has no tangent part") {
    CHECK_THROWS_AS(project_to_surface(unit, v3(1, 0, 0), v3(3, 0, 0)), Error);
  }
  SUBCASE("surface without zero set diverges") {
    const auto s = DefiningSurface::expression("x0^2 + x1^2 + x2^2 + 1", 3);
    try {
      project_to_surface(s, v3(1, 0, 0), v3(0, 1, 0));
      FAIL("expected ProjectionDiverged");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::projection_diverged);
    }
  }
}

TEST_CASE("revolution profile c·sin(φ) reproduces the ellipsoid (c, 1, 1)") {
  const auto rev = DefiningSurface::revolution("0.5*sin(phi)", 3);
  const auto ell = DefiningSurface::ellipsoid({0.5, 1, 1});
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    Vec x = rng.unit_vector(3);
    x(0) *= 0.45;
    const SurfaceJet a = rev.jet(x), b = ell.jet(x);
    // f_rev = ‖x⃗‖² + x0²/c² − 1, identical to the ellipsoid function.
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    CHECK((a.grad - b.grad).norm() < 1e-10);
    CHECK((a.hess - b.hess).norm() < 1e-9);
  }
  CHECK_THROWS_AS(rev.jet(v3(0.5, 0, 0)), Error);  // pole
}

TEST_CASE("expression surface matches the built-in ellipsoid") {
  const auto expr = DefiningSurface::expression("x0^2/4 + x1^2 + x2^2 - 1", 3);
  CHECK(expr.scale() == doctest::Approx(2.0));
  const SurfaceJet a = expr.jet(v3(0.3, 0.2, -0.5)), b = ellipsoid211().jet(v3(0.3, 0.2, -0.5));
  CHECK(a.value == doctest::Approx(b.value));
  CHECK((a.grad - b.grad).norm() < 1e-15);
  CHECK((a.hess - b.hess).norm() < 1e-15);
}

TEST_CASE("surface sampling lands on M") {
  const auto s = DefiningSurface::ellipsoid({2, 1, 0.5});
  const auto pts = sample_surface(s, 200);
  CHECK(pts.size() == 200);
  for (const Vec& x : pts) CHECK(std::abs(s.value(x)) < 1e-13);
  for (const Vec& x : sample_equator(s, 50)) {
    CHECK(x(0) == 0.0);
    CHECK(std::abs(s.value(x)) < 1e-13);
  }
}
