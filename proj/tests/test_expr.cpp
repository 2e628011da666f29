#include <doctest.h>

#include <cmath>
#include <vector>

#include "gss/error.hpp"
#include "gss/expr.hpp"
#include "gss/sampling.hpp"
#include "oracles.hpp"

using namespace gss;

namespace {

std::vector<double> pt(std::initializer_list<double> v) { return v; }

ErrorKind kind_of(std::string_view text, std::size_t dim) {
  try {
    parse_expression(text, dim);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a parse error for " << text);
  return ErrorKind::config;
}

// Smooth test functions on the box [-1, 1]^3, all with safe domains there.
const std::vector<const char*> kSmooth = {
    "x0^2/4 + x1^2 + x2^2 - 1",
    "x0^2 + x1^2 + x2^2 - 1",
    "sin(x0)*x1 + cos(x2)",
    "exp(x0*x1) - x2^3",
    "log(2 + x0^2 + x1) * x2",
    "sqrt(3 + x0 + x1*x2)",
    "x0^4 + 0.1*x1^4 + x2^2/(1 + x0^2)",
    "(x0 - x1)^3 / (4 + x2)",
    "cos(x0 + 2*x1 - x2)^2 + 1e-1*x0",
    "(1.5 + sin(x1))^(-0.5) * exp(-x2^2)",
};

}  // namespace

TEST_CASE("parse: ellipsoid, constant and sphere") {
  const auto ell = parse_expression("x0^2/4 + x1^2 + x2^2 - 1", 3);
  CHECK(ell.dimension() == 3);
  CHECK_FALSE(ell.is_constant());
  CHECK(ell.evaluate(pt({2, 0, 0})) == doctest::Approx(0.0));

  const auto zero = parse_expression("0", 2);
  CHECK(zero.is_constant());
  CHECK(zero.evaluate(pt({0.3, -0.7})) == 0.0);

  const auto sphere = parse_expression("x0^2 + x1^2 + x2^2 - 1", 3);
  CHECK(sphere.evaluate(pt({0, 0, 1})) == 0.0);
}

TEST_CASE("parse: precedence and associativity") {
  CHECK(parse_expression("-x0^2", 1).evaluate(pt({3})) == -9.0);
  CHECK(parse_expression("2 - 3 - 4", 1).evaluate(pt({0})) == -5.0);
  CHECK(parse_expression("8 / 4 / 2", 1).evaluate(pt({0})) == 1.0);
  CHECK(parse_expression("1 + 2 * 3", 1).evaluate(pt({0})) == 7.0);
  CHECK(parse_expression("2^-1", 1).evaluate(pt({0})) == 0.5);
  CHECK(parse_expression("1.5e2 + 2E-1", 1).evaluate(pt({0})) == doctest::Approx(150.2));
  CHECK(parse_expression("x0^(1+1)", 1).evaluate(pt({3})) == 9.0);
  CHECK(parse_expression("pi", 1).evaluate(pt({0})) == doctest::Approx(M_PI));
}

TEST_CASE("parse: error kinds") {
  CHECK(kind_of("x0 +", 3) == ErrorKind::syntax);
  CHECK(kind_of("x0 + * 2", 3) == ErrorKind::syntax);
  CHECK(kind_of("(x0", 3) == ErrorKind::syntax);
  CHECK(kind_of("x0 $ 1", 3) == ErrorKind::syntax);
  CHECK(kind_of("x0^x1", 3) == ErrorKind::syntax);
  CHECK(kind_of("foo(x0)", 3) == ErrorKind::unknown_identifier);
  CHECK(kind_of("y + 1", 3) == ErrorKind::unknown_identifier);
  CHECK(kind_of("x3 + 1", 3) == ErrorKind::dimension_mismatch);
  CHECK(kind_of("abs(x0) - 1", 3) == ErrorKind::non_smooth_function);
  CHECK(kind_of("max(x0, x1)", 3) == ErrorKind::non_smooth_function);
  CHECK(kind_of("x0", 17) == ErrorKind::dimension_mismatch);

  try {
    parse_expression("x0 + * 2", 3);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("column 6") != std::string::npos);
  }
}

TEST_CASE("jet_eval: hand-differentiated examples") {
  const auto sphere = parse_expression("x0^2 + x1^2 + x2^2 - 1", 3);
  const JetValue js = jet_eval(sphere, pt({1, 0, 0}));
  CHECK(js.value() == 0.0);
  CHECK(js.gradient().isApprox(Eigen::Vector3d(2, 0, 0)));
  CHECK(js.hessian().isApprox(2.0 * Eigen::Matrix3d::Identity()));

  const auto ell = parse_expression("x0^2/4 + x1^2 + x2^2 - 1", 3);
  const JetValue je = jet_eval(ell, pt({0, 1, 0}));
  CHECK(je.value() == doctest::Approx(0.0));
  CHECK(je.gradient().isApprox(Eigen::Vector3d(0, 2, 0)));
  CHECK(je.hessian().isApprox(Eigen::Vector3d(0.5, 2, 2).asDiagonal().toDenseMatrix()));

  const auto prod = parse_expression("sin(x0)*x1", 2);
  const JetValue jp = jet_eval(prod, pt({0, 1}));
  CHECK(jp.value() == 0.0);
  CHECK(jp.grad(0) == 1.0);
  CHECK(jp.grad(1) == 0.0);
  CHECK(jp.hess(0, 0) == 0.0);
  CHECK(jp.hess(0, 1) == 1.0);
  CHECK(jp.hess(1, 1) == 0.0);
}

TEST_CASE("jet_eval: constants have zero derivatives") {
  const JetValue j = jet_eval(parse_expression("3 + sin(2)", 3), pt({0.1, 0.2, 0.3}));
  CHECK(j.gradient().isZero(0.0));
  CHECK(j.hessian().isZero(0.0));
}

TEST_CASE("jet_eval: domain errors name the subexpression") {
  auto domain_message = [](const char* text, std::vector<double> x) -> std::string {
    const auto ast = parse_expression(text, x.size());
    try {
      jet_eval(ast, x);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
      return e.what();
    }
    FAIL("expected DomainError for " << text);
    return {};
  };
  CHECK(domain_message("log(x0 - 1)", {0.5}).find("log((x0 - 1))") != std::string::npos);
  CHECK(domain_message("sqrt(x0)", {-1.0}).find("sqrt(x0)") != std::string::npos);
  CHECK(domain_message("1/x0", {0.0}).find("(1 / x0)") != std::string::npos);
  CHECK_THROWS_AS(parse_expression("x0^0.5", 1).evaluate(pt({-1.0})), Error);
}

TEST_CASE("jets agree with central finite differences") {
  Rng rng(7);
  for (const char* text : kSmooth) {
    CAPTURE(text);
    const auto ast = parse_expression(text, 3);
    const oracle::Scalar f = [&](const oracle::Vec& x) {
      return ast.evaluate(std::span<const double>(x.data(), 3));
    };
    for (int k = 0; k < 20; ++k) {
      oracle::Vec x(3);
      for (auto& c : x) c = 2.0 * rng.uniform() - 1.0;
      const JetValue j = ast.jet(std::span<const double>(x.data(), 3));
      const oracle::Vec g = oracle::fd_gradient(f, x);
      const oracle::Mat h = oracle::fd_hessian(f, x);
      CHECK((j.gradient() - g).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()));
      CHECK((j.hessian() - h).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, h.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("pretty-print round trip preserves evaluation") {
  Rng rng(11);
  for (const char* text : kSmooth) {
    const auto ast = parse_expression(text, 3);
    const auto again = parse_expression(ast.to_string(), 3);
    CAPTURE(ast.to_string());
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
      CHECK(again.evaluate(x) == ast.evaluate(x));
    }
  }
}

TEST_CASE("Hessian symmetry is bitwise") {
  const auto ast = parse_expression("exp(x0*x1) * sin(x2 - x0) / (2 + x1^2)", 3);
  const JetValue j = ast.jet(pt({0.3, -0.4, 0.9}));
  const auto h = j.hessian();
  CHECK(h == h.transpose());
}
