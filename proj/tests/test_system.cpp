#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "linsing/errors.hpp"
#include "linsing/system.hpp"
#include "test_helpers.hpp"

using namespace linsing;
using testing_support::cascade_system;
using testing_support::rotation_system;
using testing_support::vec;

TEST_CASE("pointwise data for the cascade system at a consistent point") {
  SingularSystem sys = cascade_system();
  PointLinearData d = analyze_point(sys, vec({0.0, 3.0}));
  CHECK(d.rank == 1);
  REQUIRE(d.kernel.cols() == 1);
  CHECK(std::abs(d.kernel(1, 0)) == doctest::Approx(1.0));
  CHECK(d.consistency_residual == doctest::Approx(0.0));
  CHECK(d.min_norm_solution(0) == doctest::Approx(3.0));
  CHECK(d.min_norm_solution(1) == doctest::Approx(0.0));
}

TEST_CASE("inconsistent point is measured, not masked") {
  SingularSystem sys = cascade_system();
  PointLinearData d = analyze_point(sys, vec({1.0, 0.0}));
  CHECK(d.consistency_residual == doctest::Approx(1.0));
  CHECK_THROWS_AS(solution_affine_set(sys, vec({1.0, 0.0})), InconsistentPoint);
}

TEST_CASE("solution affine set collects particular plus kernel") {
  SingularSystem sys = rotation_system();
  AffineSolutionSet s = solution_affine_set(sys, vec({1.0, 0.0, 0.0}));
  CHECK(s.particular(0) == doctest::Approx(0.0));
  CHECK(s.particular(1) == doctest::Approx(1.0));
  CHECK(s.particular(2) == doctest::Approx(0.0));
  REQUIRE(s.kernel.cols() == 1);
  CHECK(std::abs(s.kernel(2, 0)) == doctest::Approx(1.0));
}

TEST_CASE("image projector is an orthogonal projector onto the image") {
  SingularSystem sys = rotation_system();
  PointLinearData d = analyze_point(sys, vec({0.2, -0.7, 1.0}));
  const Eigen::MatrixXd& P = d.image_projector;
  CHECK((P * P - P).norm() < 1e-12);
  CHECK((P - P.transpose()).norm() < 1e-12);
  CHECK(((Eigen::MatrixXd::Identity(3, 3) - P) * d.A).norm() < 1e-12);
}

TEST_CASE("rank and kernel ignore a global scale") {
  SingularSystem scaled;
  scaled.n = 2;
  scaled.m = 2;
  scaled.A = SmoothMap::parse("1e8, 0; 0, 0", 2);
  scaled.b = SmoothMap::parse("1e8*x2; 1e8*x1", 2);
  PointLinearData d = analyze_point(scaled, vec({0.0, 3.0}));
  CHECK(d.rank == 1);
  CHECK(d.kernel.cols() == 1);
  CHECK(d.consistency_residual == doctest::Approx(0.0));
}

TEST_CASE("analysis is deterministic") {
  SingularSystem sys = rotation_system();
  PointLinearData a = analyze_point(sys, vec({0.3, 0.4, 0.5}));
  PointLinearData b = analyze_point(sys, vec({0.3, 0.4, 0.5}));
  CHECK((a.kernel - b.kernel).norm() == 0.0);
  CHECK((a.min_norm_solution - b.min_norm_solution).norm() == 0.0);
}

TEST_CASE("shape violations are rejected early") {
  SingularSystem sys = cascade_system();
  CHECK_THROWS_AS(analyze_point(sys, vec({1.0})), ShapeError);
  SingularSystem bad = cascade_system();
  bad.m = 3;
  CHECK_THROWS_AS(bad.validate(), ShapeError);
  SingularSystem nan_sys = cascade_system();
  Eigen::VectorXd p(2);
  p << std::numeric_limits<double>::infinity(), 0.0;
  CHECK_THROWS_AS(analyze_point(nan_sys, p), NumericError);
}
