#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "linsing/errors.hpp"
#include "linsing/variations.hpp"
#include "test_helpers.hpp"

using namespace linsing;
using testing_support::vec;

TEST_CASE("family slices: value, base map, first variation") {
  SmoothMap fam = SmoothMap::parse_with_eps("(x1 + eps)^2", 1);
  CHECK(family_eval(fam, 0.3, vec({1.5}))(0) == doctest::Approx(3.24));
  CHECK(base_map(fam).eval_vector(vec({1.5}))(0) == doctest::Approx(2.25));
  CHECK(infinitesimal_variation(fam, vec({1.5}))(0) == doctest::Approx(3.0));

  SmoothMap w = variation_field(fam);
  CHECK(w.eval_vector(vec({-0.4}))(0) == doctest::Approx(-0.8));
}

TEST_CASE("composition at shared parameter follows the chain rule") {
  SmoothMap f = SmoothMap::parse_with_eps("x1 + eps", 1);
  SmoothMap g = SmoothMap::parse_with_eps("eps*x1", 1);

  // (g after f)(eps, x) = eps*(x + eps), variation x
  SmoothMap gf = compose_families(g, f);
  CHECK(family_eval(gf, 0.2, vec({0.7}))(0) == doctest::Approx(0.18));
  CHECK(infinitesimal_variation(gf, vec({0.7}))(0) ==
        doctest::Approx(0.7).epsilon(1e-6));
  CHECK(composed_variation(g, f, vec({0.7}))(0) ==
        doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("composition refuses mismatched spaces") {
  SmoothMap f = SmoothMap::parse_with_eps("x1 + eps; x1*eps", 1);
  SmoothMap g = SmoothMap::parse_with_eps("eps*x1", 1);
  CHECK_THROWS_AS(compose_families(g, f), ShapeError);
}

TEST_CASE("family helpers reject maps without a parameter slot") {
  SmoothMap plain = SmoothMap::parse("x1^2", 1);
  CHECK_THROWS_AS(family_eval(plain, 0.1, vec({1.0})), ShapeError);
  CHECK_THROWS_AS(base_map(plain), ShapeError);
}

TEST_CASE("conjugating exp by translation and scaling flows is the identity") {
  SmoothMap h0 = SmoothMap::parse("exp(x1)", 1);
  SmoothMap X = SmoothMap::parse("1 + 0*x1", 1);
  SmoothMap Y = SmoothMap::parse("x1", 1);

  SmoothMap fam = flow_transform_family(h0, X, Y);
  Eigen::VectorXd x = vec({0.4});
  CHECK(std::abs(family_eval(fam, 0.25, x)(0) - std::exp(0.4)) < 1e-10);

  CHECK(generalized_lie_derivative(h0, X, Y, x).norm() < 1e-13);

  InvarianceResult inv = invariance_test(h0, X, Y, x, 0.1);
  CHECK(inv.r_eps < 1e-10);
  CHECK(inv.first_order_vanishes);
  CHECK(inv.verdict == Verdict::Pass);
}

TEST_CASE("lie derivative detects a mismatched target field") {
  SmoothMap h0 = SmoothMap::parse("exp(x1)", 1);
  SmoothMap X = SmoothMap::parse("1 + 0*x1", 1);
  SmoothMap Y2 = SmoothMap::parse("2*x1", 1);
  Eigen::VectorXd x = vec({0.3});
  CHECK(generalized_lie_derivative(h0, X, Y2, x).norm() ==
        doctest::Approx(std::exp(0.3)).epsilon(1e-12));
}

TEST_CASE("remainder ratio separates first and second order failure") {
  SmoothMap h0 = SmoothMap::parse("x1^2", 1);
  SmoothMap X = SmoothMap::parse("1 + 0*x1", 1);
  SmoothMap Y = SmoothMap::parse("0*x1", 1);

  // at the critical point the displacement is exactly eps^2
  InvarianceResult at0 = invariance_test(h0, X, Y, vec({0.0}), 1e-3);
  CHECK(at0.first_order_vanishes);
  CHECK(at0.ratio == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(at0.verdict == Verdict::Pass);

  // away from it the first order term dominates and the ratio drops to 2
  InvarianceResult at1 = invariance_test(h0, X, Y, vec({1.0}), 1e-3);
  CHECK_FALSE(at1.first_order_vanishes);
  CHECK(at1.ratio == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(at1.verdict == Verdict::Fail);
}

TEST_CASE("fields constant on fibers project, others do not") {
  SmoothMap pi = SmoothMap::parse("x1", 2);
  std::vector<Eigen::VectorXd> fiber = {vec({1.0, 0.0}), vec({1.0, 1.0}),
                                        vec({1.0, -2.0})};

  SmoothMap good = SmoothMap::parse("x1^2; x1*x2", 2);
  ProjectabilityResult ok = projectability_test(good, pi, fiber);
  CHECK(ok.verdict == Verdict::Pass);
  CHECK(ok.max_spread < 1e-12);
  CHECK(ok.base_value(0) == doctest::Approx(1.0));

  SmoothMap bad = SmoothMap::parse("x2; 0*x1", 2);
  ProjectabilityResult no = projectability_test(bad, pi, fiber);
  CHECK(no.verdict == Verdict::Fail);
  CHECK(no.max_spread == doctest::Approx(2.0));  // farthest probe from the first
}

TEST_CASE("probes on different fibers are rejected") {
  SmoothMap pi = SmoothMap::parse("x1", 2);
  SmoothMap Y = SmoothMap::parse("x1; x2", 2);
  std::vector<Eigen::VectorXd> mixed = {vec({1.0, 0.0}), vec({2.0, 0.0})};
  CHECK_THROWS_AS(projectability_test(Y, pi, mixed), ShapeError);
}

TEST_CASE("linearity holds for a matrix operator over many random pairs") {
  Eigen::MatrixXd M(2, 2);
  M << 2, 1, 0, -1;
  auto op = [&M](const Eigen::VectorXd& v) { return Eigen::VectorXd(M * v); };
  SampleStream rng(7);
  SymmetryReport rep = linearity_test(op, 2, rng, 50);
  CHECK(rep.passed());
  for (const ConditionResult& c : rep.conditions) CHECK(c.max_residual < 1e-12);
}

TEST_CASE("linearity test flags quadratic and affine operators") {
  auto quad = [](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = v;
    out(0) = v(0) * v(0);
    return out;
  };
  SampleStream rng(7);
  CHECK(linearity_test(quad, 2, rng, 20).verdict == Verdict::Fail);

  auto affine = [](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(v + Eigen::VectorXd::Ones(v.size()));
  };
  SampleStream rng2(7);
  SymmetryReport rep = linearity_test(affine, 2, rng2, 20);
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.conditions[0].name == "zero_offset");
  CHECK(rep.conditions[0].verdict == Verdict::Fail);
}

TEST_CASE("the variation operator of composition is linear in the inner variation") {
  // freeze g and probe w -> Dg0(y) w, the tangent action entering the
  // chain rule; it must be linear in w
  SmoothMap g0 = SmoothMap::parse("x1*x2; x1 - x2", 2);
  Eigen::VectorXd y = vec({0.6, -1.1});
  auto op = [&](const Eigen::VectorXd& w) {
    return Eigen::VectorXd(g0.directional(y, w).col(0));
  };
  SampleStream rng(11);
  SymmetryReport rep = linearity_test(op, 2, rng, 30);
  CHECK(rep.passed());
}
