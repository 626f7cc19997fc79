#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "linsing/constraints.hpp"
#include "linsing/errors.hpp"
#include "linsing/presymplectic.hpp"
#include "test_helpers.hpp"

using namespace linsing;
using testing_support::vec;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TEST_CASE("one-dimensional lift doubles into the canonical pair") {
  SingularSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.A = SmoothMap::parse("1 + 0*x1", 1);
  sys.b = SmoothMap::parse("x1", 1);
  LiftedSystem lifted = lift(sys);
  CHECK(lifted.base_n == 1);

  Eigen::VectorXd z = vec({0.7, -0.3});
  Eigen::MatrixXd w = lifted.omega_matrix(z);
  CHECK(w(0, 0) == 0.0);
  CHECK(w(0, 1) == doctest::Approx(1.0));
  CHECK(w(1, 0) == doctest::Approx(-1.0));

  SingularSystem big = lifted.as_singular_system();
  CHECK(big.n == 2);
  Eigen::MatrixXd Az = big.A.eval(z);
  Eigen::MatrixXd expect(2, 2);
  expect << 0, -1, 1, 0;
  CHECK((Az - expect).norm() == 0.0);
  Eigen::VectorXd bz = big.b.eval_vector(z);
  CHECK(bz(0) == doctest::Approx(-0.3));  // dH/dx = p
  CHECK(bz(1) == doctest::Approx(0.7));   // dH/dp = x
}

TEST_CASE("the lifted one-dimensional system solves x' = x, p' = -p") {
  SingularSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.A = SmoothMap::parse("1 + 0*x1", 1);
  sys.b = SmoothMap::parse("x1", 1);
  SingularSystem big = lift(sys).as_singular_system();
  // A z' = grad H with the block structure above pins z' = (x, -p)
  Eigen::VectorXd z = vec({2.0, 5.0});
  Eigen::MatrixXd Az = big.A.eval(z);
  Eigen::VectorXd rhs = big.b.eval_vector(z);
  Eigen::VectorXd zdot = Az.partialPivLu().solve(rhs);
  CHECK(zdot(0) == doctest::Approx(2.0));
  CHECK(zdot(1) == doctest::Approx(-5.0));
}

TEST_CASE("rotation lift keeps the full space as its constraint set") {
  SingularSystem sys = testing_support::rotation_system();
  LiftedSystem lifted = lift(sys);

  Eigen::VectorXd z(6);
  z << 0.3, -0.8, 0.5, 1.0, 0.2, -0.4;
  Eigen::VectorXd th = lifted.theta.eval_vector(z);
  CHECK(th(0) == doctest::Approx(-0.2));  // -p2
  CHECK(th(1) == doctest::Approx(1.0));   // p1
  CHECK(th(2) == 0.0);
  CHECK(lifted.H.eval_vector(z)(0) == doctest::Approx(0.3 * 1.0 + (-0.8) * 0.2));

  SingularSystem big = lifted.as_singular_system();
  ConstraintChain chain = run_chain(big, z);
  CHECK(chain.status == ChainStatus::Stabilized);
  CHECK(chain.dims() == std::vector<int>{6, 6});
}

TEST_CASE("cascade lift stabilizes at the origin after two cuts") {
  SingularSystem big = lift(testing_support::cascade_system()).as_singular_system();
  ConstraintChain chain = run_chain(big, Eigen::VectorXd::Zero(4));
  CHECK(chain.status == ChainStatus::Stabilized);
  CHECK(chain.dims() == std::vector<int>{4, 2, 0});
}

TEST_CASE("omega is exactly skew and closed") {
  // x-dependent coefficient so closedness is not vacuous
  SingularSystem sys;
  sys.n = 2;
  sys.m = 2;
  sys.A = SmoothMap::parse("x2, 0; 0, x1*x2", 2);
  sys.b = SmoothMap::parse("x2; x1", 2);
  LiftedSystem lifted = lift(sys);
  Eigen::VectorXd z(4);
  z << 0.9, -1.3, 0.4, 2.2;
  Eigen::MatrixXd w = lifted.omega_matrix(z);
  CHECK((w + w.transpose()).norm() == 0.0);
  CHECK(lifted.closedness_residual(z) < 1e-12);
}

TEST_CASE("a vanishing coefficient matrix lifts to the critical set of H") {
  SingularSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.A = SmoothMap::parse("0*x1", 1);
  sys.b = SmoothMap::parse("x1", 1);
  SingularSystem big = lift(sys).as_singular_system();

  ConstraintChain at_origin = run_chain(big, Eigen::VectorXd::Zero(2));
  CHECK(at_origin.status == ChainStatus::Stabilized);
  CHECK(at_origin.dims() == std::vector<int>{2, 0});

  ConstraintChain off = run_chain(big, vec({1.0, 0.0}));
  CHECK(off.status == ChainStatus::Inconsistent);
}

TEST_CASE("lifted systems stay printable and reparse to the same values") {
  SingularSystem big = lift(testing_support::cascade_system()).as_singular_system();
  CHECK(big.A.printable());
  CHECK(big.b.printable());
  CHECK(big.labels == std::vector<std::string>{"x1", "x2", "p1", "p2"});

  SmoothMap a2 = SmoothMap::parse(big.A.str(), 4);
  SmoothMap b2 = SmoothMap::parse(big.b.str(), 4);
  Eigen::VectorXd z(4);
  z << 0.3, -1.1, 0.8, 0.25;
  CHECK((a2.eval(z) - big.A.eval(z)).norm() == 0.0);
  CHECK((b2.eval_vector(z) - big.b.eval_vector(z)).norm() == 0.0);
}

TEST_CASE("lift refuses closure-backed systems") {
  SingularSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.A = SmoothMap::from_function(1, 1, 1, [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(1, 1);
  });
  sys.b = SmoothMap::parse("x1", 1);
  CHECK_THROWS_AS(lift(sys), Error);
}

TEST_CASE("rotations leave the contact form and energy invariant upstairs") {
  SingularSystem sys = testing_support::rotation_system();
  double alpha = 0.5;
  std::string c = num(std::cos(alpha));
  std::string s = num(std::sin(alpha));
  SmoothMap phi = SmoothMap::parse(
      "x1*" + c + " - x2*" + s + "; x1*" + s + " + x2*" + c + "; x3", 3);
  SmoothMap Phi = SmoothMap::parse(
      c + ", -" + s + ", 0; " + s + ", " + c + ", 0; 0, 0, 1", 3);

  std::vector<Eigen::VectorXd> pts;
  Eigen::VectorXd z(6);
  z << 1.0, 0.0, 0.2, 0.4, -0.7, 1.1;
  pts.push_back(z);
  z << -0.3, 0.8, -1.0, 0.0, 0.5, 0.0;
  pts.push_back(z);

  SymmetryReport rep = check_dual_invariance(sys, phi, Phi, pts);
  CHECK(rep.passed());
  for (const ConditionResult& cnd : rep.conditions)
    CHECK(cnd.max_residual < 1e-9);
}

TEST_CASE("a mismatched companion breaks dual invariance") {
  SingularSystem sys = testing_support::rotation_system();
  double alpha = 0.5;
  std::string c = num(std::cos(alpha));
  std::string s = num(std::sin(alpha));
  SmoothMap phi = SmoothMap::parse(
      "x1*" + c + " - x2*" + s + "; x1*" + s + " + x2*" + c + "; x3", 3);
  SmoothMap wrong = SmoothMap::parse("1, 0, 0; 0, 1, 0; 0, 0, 1", 3);

  std::vector<Eigen::VectorXd> pts;
  Eigen::VectorXd z(6);
  z << 1.0, 0.0, 0.2, 0.4, -0.7, 1.1;
  pts.push_back(z);

  SymmetryReport rep = check_dual_invariance(sys, phi, wrong, pts);
  CHECK(rep.verdict == Verdict::Fail);
}
