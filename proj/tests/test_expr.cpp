#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "linsing/errors.hpp"
#include "linsing/expr.hpp"
#include "linsing/numeric.hpp"

using linsing::Dual;
using linsing::Expression;
using linsing::parse_expression;

namespace {

double eval1(const Expression& e, double x) { return e.eval(&x, 1); }

double eval2(const Expression& e, double x1, double x2) {
  double v[2] = {x1, x2};
  return e.eval(v, 2);
}

}  // namespace

TEST_CASE("literals and variables evaluate") {
  CHECK(eval1(parse_expression("3.5", 1), 0.0) == 3.5);
  CHECK(eval1(parse_expression("x1", 1), -2.0) == -2.0);
  CHECK(eval2(parse_expression("x1 + 2*x2", 2), 1.0, 3.0) == 7.0);
}

TEST_CASE("arithmetic and functions") {
  CHECK(eval1(parse_expression("x1^3", 1), 2.0) == 8.0);
  CHECK(eval1(parse_expression("pow(x1, 3)", 1), 2.0) == 8.0);
  CHECK(eval1(parse_expression("x1^(-2)", 1), 2.0) == doctest::Approx(0.25));
  CHECK(eval1(parse_expression("sin(x1)", 1), 0.5) == doctest::Approx(std::sin(0.5)));
  CHECK(eval1(parse_expression("exp(log(x1))", 1), 3.0) == doctest::Approx(3.0));
  CHECK(eval1(parse_expression("sqrt(x1)", 1), 9.0) == doctest::Approx(3.0));
  CHECK(eval1(parse_expression("tanh(x1)", 1), 0.3) == doctest::Approx(std::tanh(0.3)));
}

TEST_CASE("unary minus binds tighter than the power") {
  CHECK(eval1(parse_expression("-2^2", 1), 0.0) == 4.0);
  CHECK(eval1(parse_expression("-(2^2)", 1), 0.0) == -4.0);
  CHECK(eval1(parse_expression("2 - 2^2", 1), 0.0) == -2.0);
}

TEST_CASE("division and subtraction associate left") {
  CHECK(eval1(parse_expression("8 / 4 / 2", 1), 0.0) == 1.0);
  CHECK(eval1(parse_expression("8 - 4 - 2", 1), 0.0) == 2.0);
}

TEST_CASE("dual numbers carry exact first derivatives") {
  Expression e = parse_expression("x1^2 * sin(x2)", 2);
  Dual in[2] = {{1.5, 1.0}, {0.7, 0.0}};
  Dual out = e.eval_dual(in, 2);
  CHECK(out.v == doctest::Approx(1.5 * 1.5 * std::sin(0.7)));
  CHECK(out.d == doctest::Approx(2.0 * 1.5 * std::sin(0.7)));
  in[0].d = 0.0;
  in[1].d = 1.0;
  out = e.eval_dual(in, 2);
  CHECK(out.d == doctest::Approx(1.5 * 1.5 * std::cos(0.7)));
}

TEST_CASE("symbolic derivative matches dual derivative") {
  std::vector<std::string> cases = {
      "x1^3 - 2*x1", "sin(x1)*cos(x1)", "exp(x1 / (1 + x1^2))",
      "sqrt(1 + x1^2)", "tanh(x1) * x1"};
  for (const std::string& text : cases) {
    Expression e = parse_expression(text, 1);
    Expression de = e.derivative(0);
    for (double x : {-1.3, 0.2, 0.9}) {
      Dual in{x, 1.0};
      CHECK(de.eval(&x, 1) == doctest::Approx(e.eval_dual(&in, 1).d).epsilon(1e-12));
    }
  }
}

TEST_CASE("second symbolic derivative is usable") {
  Expression e = parse_expression("x1^4", 1);
  Expression d2 = e.derivative(0).derivative(0);
  CHECK(eval1(d2, 2.0) == doctest::Approx(48.0));
}

TEST_CASE("print then parse evaluates identically") {
  std::vector<std::string> cases = {
      "-x1^2 + 3*(x2 - 1)",
      "x1*x2 / (x2 - 4) - sin(x1 - x2)",
      "pow(x1 + x2, 3) * exp(-x1)",
      "1 / (1 + exp(-x1)) + sqrt(4 + x2^2)",
  };
  for (const std::string& text : cases) {
    Expression e = parse_expression(text, 2);
    Expression round = parse_expression(e.str(), 2);
    for (double a : {-0.9, 0.3, 2.2})
      for (double b : {-1.5, 0.6}) {
        CAPTURE(text);
        CHECK(eval2(round, a, b) == doctest::Approx(eval2(e, a, b)).epsilon(1e-14));
      }
  }
}

TEST_CASE("builders fold trivial terms away") {
  Expression x = Expression::variable(0);
  Expression zero = Expression::literal(0.0);
  Expression one = Expression::literal(1.0);
  CHECK((zero + x).str() == x.str());
  CHECK((x * zero).is_literal_zero());
  CHECK((x * one).str() == x.str());
  CHECK((zero * (x + one)).is_literal_zero());
}

TEST_CASE("parse errors carry position and reason") {
  CHECK_THROWS_WITH_AS(parse_expression("x3", 2),
                       doctest::Contains("variable x3 outside declared arity"),
                       linsing::ParseError);
  CHECK_THROWS_AS(parse_expression("x1 +", 1), linsing::ParseError);
  CHECK_THROWS_AS(parse_expression("foo(x1)", 1), linsing::ParseError);
  CHECK_THROWS_AS(parse_expression("x1 $ 2", 1), linsing::ParseError);
  CHECK_THROWS_AS(parse_expression("x1 ^ x1", 1), linsing::ParseError);
  CHECK_THROWS_AS(parse_expression("x1 ^ 1.5", 1), linsing::ParseError);
}

TEST_CASE("domain failures throw, not NaN") {
  double bad = -1.0;
  CHECK_THROWS_AS(parse_expression("log(x1)", 1).eval(&bad, 1),
                  linsing::DomainError);
  CHECK_THROWS_AS(parse_expression("sqrt(x1)", 1).eval(&bad, 1),
                  linsing::DomainError);
  double zero = 0.0;
  CHECK_THROWS_AS(parse_expression("1 / x1", 1).eval(&zero, 1),
                  linsing::DomainError);
  Dual at_zero{0.0, 1.0};
  CHECK_THROWS_AS(parse_expression("sqrt(x1)", 1).eval_dual(&at_zero, 1),
                  linsing::DomainError);
}

TEST_CASE("eps slot parses in family mode") {
  // total arity counts the eps slot
  Expression e = linsing::parse_expression("x1 + eps * x1^2", 2, true);
  double v[2] = {0.5, 2.0};  // eps, x1
  CHECK(e.eval(v, 2) == doctest::Approx(2.0 + 0.5 * 4.0));
}

TEST_CASE("grids reject ragged rows") {
  CHECK_THROWS_WITH_AS(linsing::parse_grid("1, 2; 3", 2),
                       doctest::Contains("expected"), linsing::ParseError);
}

TEST_CASE("central differences shrink at the expected order") {
  // the FD fallback used for closure-backed maps is second order: errors
  // drop about a hundredfold when the step drops tenfold
  auto fd = [](double x, double h) {
    auto f = [](double t) { return std::exp(std::sin(t)); };
    return (f(x + h) - f(x - h)) / (2 * h);
  };
  double x = 0.4;
  double exact = std::cos(x) * std::exp(std::sin(x));
  double e3 = std::abs(fd(x, 1e-3) - exact);
  double e4 = std::abs(fd(x, 1e-4) - exact);
  CHECK(e3 / e4 > 30.0);
  CHECK(e3 / e4 < 300.0);
}
