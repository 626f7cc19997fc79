#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "linsing/numeric.hpp"
#include "linsing/smooth_map.hpp"

namespace linsing {

// Tolerances shared across the toolkit. rank_rel is relative to the largest
// singular value; the others are absolute on residual norms.
struct ToleranceSet {
  double rank_rel = 1e-9;
  double consistency = 1e-7;
  double fd_step = 1e-6;
  double projection = 1e-10;
  double defect = 1e-4;
};

// The equation A(x) dx/dt = b(x) on R^n with m-dimensional left-hand side.
struct SingularSystem {
  int n = 0;
  int m = 0;
  SmoothMap A;  // m x n matrix-valued, arity n
  SmoothMap b;  // m-vector, arity n
  std::string name;
  std::vector<std::string> labels;

  void validate() const;
};

// Linear-algebra snapshot of the system at one point.
struct PointLinearData {
  Eigen::VectorXd x;
  Eigen::MatrixXd A;               // m x n
  Eigen::VectorXd b;               // m
  Eigen::VectorXd singular_values;
  int rank = 0;
  Eigen::MatrixXd kernel;           // n x (n - rank), orthonormal
  Eigen::MatrixXd image_projector;  // m x m, orthogonal projector onto Im A
  double consistency_residual = 0.0;   // distance from b to Im A
  Eigen::VectorXd min_norm_solution;   // least-squares u with smallest norm
};

PointLinearData analyze_point(const SingularSystem& sys,
                              const Eigen::VectorXd& x,
                              double rank_rel_tol = 1e-9);

double consistency_residual(const SingularSystem& sys, const Eigen::VectorXd& x,
                            double rank_rel_tol = 1e-9);

// The affine solution set u0 + span(kernel) at a consistent point.
struct AffineSolutionSet {
  Eigen::VectorXd particular;
  Eigen::MatrixXd kernel;
};

AffineSolutionSet solution_affine_set(const SingularSystem& sys,
                                      const Eigen::VectorXd& x,
                                      const ToleranceSet& tol = {});

}  // namespace linsing
