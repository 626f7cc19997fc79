#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "linsing/errors.hpp"
#include "linsing/smooth_map.hpp"
#include "test_helpers.hpp"

using linsing::SmoothMap;
using testing_support::vec;

TEST_CASE("grid maps evaluate entrywise") {
  SmoothMap m = SmoothMap::parse("x1, x2; x1*x2, 1", 2);
  Eigen::MatrixXd got = m.eval(vec({2.0, 3.0}));
  CHECK(got(0, 0) == 2.0);
  CHECK(got(0, 1) == 3.0);
  CHECK(got(1, 0) == 6.0);
  CHECK(got(1, 1) == 1.0);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
  CHECK(m.printable());
}

TEST_CASE("jacobian of a grid map is exact") {
  SmoothMap f = SmoothMap::parse("x1^2; x1*x2; sin(x2)", 2);
  Eigen::MatrixXd J = f.jacobian(vec({1.5, 0.7}));
  CHECK(J(0, 0) == doctest::Approx(3.0));
  CHECK(J(0, 1) == 0.0);
  CHECK(J(1, 0) == doctest::Approx(0.7));
  CHECK(J(1, 1) == doctest::Approx(1.5));
  CHECK(J(2, 1) == doctest::Approx(std::cos(0.7)));
}

TEST_CASE("directional derivative equals jacobian action") {
  SmoothMap f = SmoothMap::parse("exp(x1)*x2; x1 - x2^3", 2);
  Eigen::VectorXd x = vec({0.3, -0.8});
  Eigen::VectorXd s = vec({0.6, 0.1});
  Eigen::MatrixXd d = f.directional(x, s);
  Eigen::VectorXd expected = f.jacobian(x) * s;
  CHECK((d.col(0) - expected).norm() < 1e-12);
}

TEST_CASE("closure maps differentiate by central differences") {
  SmoothMap f = SmoothMap::from_function(
      2, 2, 1,
      [](const Eigen::VectorXd& x) {
        Eigen::MatrixXd out(2, 1);
        out(0, 0) = x(0) * x(0);
        out(1, 0) = x(0) * x(1);
        return out;
      });
  Eigen::MatrixXd J = f.jacobian(vec({2.0, 5.0}));
  CHECK(J(0, 0) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(J(1, 0) == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(J(1, 1) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_FALSE(f.printable());
}

TEST_CASE("partials return one slice per input slot") {
  SmoothMap A = SmoothMap::parse("x1, x2; 0, x1*x2", 2);
  auto d = A.partials(vec({2.0, 3.0}));
  REQUIRE(d.size() == 2);
  CHECK(d[0](0, 0) == doctest::Approx(1.0));
  CHECK(d[0](1, 1) == doctest::Approx(3.0));
  CHECK(d[1](0, 1) == doctest::Approx(1.0));
  CHECK(d[1](1, 1) == doctest::Approx(2.0));
}

TEST_CASE("family slot eps occupies slot zero") {
  SmoothMap h = SmoothMap::parse_with_eps("x1 + eps*x1^2; x2", 2);
  CHECK(h.has_eps());
  CHECK(h.arity() == 3);
  Eigen::VectorXd z = vec({0.5, 2.0, 7.0});
  Eigen::VectorXd out = h.eval(z).col(0);
  CHECK(out(0) == doctest::Approx(2.0 + 0.5 * 4.0));
  CHECK(out(1) == 7.0);
}

TEST_CASE("printing a grid map round-trips through the parser") {
  SmoothMap m = SmoothMap::parse("x1 - x2^2, 2/x1; -x1*(x2 + 1), 0", 2);
  SmoothMap back = SmoothMap::parse(m.str(), 2);
  Eigen::VectorXd x = vec({1.7, -0.4});
  CHECK((back.eval(x) - m.eval(x)).norm() < 1e-14);
}

TEST_CASE("entry access and shape guards") {
  SmoothMap m = SmoothMap::parse("x1; x2", 2);
  CHECK(m.entry(0, 0).str() == "x1");
  CHECK_THROWS_AS(m.eval(vec({1.0})), linsing::ShapeError);
  SmoothMap wide = SmoothMap::parse("x1, x2", 2);
  CHECK_THROWS_AS(wide.eval_vector(vec({1.0, 2.0})), linsing::ShapeError);
  SmoothMap closure = SmoothMap::from_function(
      1, 1, 1, [](const Eigen::VectorXd& x) {
        return Eigen::MatrixXd::Constant(1, 1, x(0));
      });
  CHECK_THROWS_AS(closure.entry(0, 0), linsing::Error);
}

TEST_CASE("domain errors from entries name the entry") {
  SmoothMap m = SmoothMap::parse("x1; log(x2)", 2);
  CHECK_THROWS_WITH_AS(m.eval(vec({1.0, -2.0})), doctest::Contains("(2,1)"),
                       linsing::DomainError);
}

TEST_CASE("identity and constant helpers") {
  SmoothMap id = SmoothMap::identity(3);
  Eigen::VectorXd x = vec({3.0, -1.0, 0.5});
  CHECK((id.eval_vector(x) - x).norm() == 0.0);
  Eigen::MatrixXd value(2, 2);
  value << 1, 2, 3, 4;
  SmoothMap c = SmoothMap::constant(3, value);
  CHECK((c.eval(x) - value).norm() == 0.0);
}
