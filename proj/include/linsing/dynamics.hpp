#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <vector>

#include "linsing/constraints.hpp"
#include "linsing/system.hpp"

namespace linsing {

// Coefficients for the gauge directions, called once per accepted step at
// the step's base point. Returns a vector matching gauge_basis columns.
using GaugeFn = std::function<Eigen::VectorXd(
    double t, const Eigen::VectorXd& x, const Eigen::MatrixXd& gauge_basis)>;

GaugeFn fixed_gauge(const Eigen::VectorXd& coefficients);

// Velocity data on the final constraint set at one point.
struct FinalVector {
  Eigen::VectorXd u;            // min-norm solution of A u = b within W_f
  Eigen::MatrixXd gauge_basis;  // W_f directions annihilated by A
  double residual = 0.0;        // || A u - b ||
};

// Min-norm consistent velocity at a point, no subspace restriction.
Eigen::VectorXd primary_vector(const SingularSystem& sys,
                               const Eigen::VectorXd& x,
                               const ToleranceSet& tol = {});

// Velocity restricted to the chain's final subspace. Throws NotOnFinal if
// the chain did not stabilize, FinalInconsistency if b leaves the image of
// A restricted to the final subspace.
FinalVector final_vector(const SingularSystem& sys, const ConstraintChain& chain,
                         const Eigen::VectorXd& x, const ToleranceSet& tol = {});

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> step_defects;      // midpoint residual per step
  std::vector<double> projection_residuals;
  int gauge_dim = 0;
};

struct IntegrateOptions {
  double step = 1e-2;
  double t_end = 1.0;
  GaugeFn gauge;  // empty = pure min-norm evolution
  ToleranceSet tol;
};

// RK4 on the constrained field with a post-step pull back onto the
// constraint set. The initial point must lie on the final constraint set.
Trajectory integrate(const SingularSystem& sys, const Eigen::VectorXd& x0,
                     const IntegrateOptions& opts);

// Gauss-Newton pull of y onto the zero set of the accumulated residuals.
// Returns the corrected point; final residual norm goes to *residual_out.
Eigen::VectorXd project_to_final(const ConstraintStack& stack,
                                 const Eigen::VectorXd& y,
                                 const ToleranceSet& tol,
                                 double* residual_out = nullptr);

struct DefectReport {
  double max_defect = 0.0;
  double mean_defect = 0.0;
  std::vector<double> per_sample;  // interior sample values
  int order = 4;                   // differencing order actually used
};

// How well a discrete trajectory satisfies A(x) dx/dt = b(x), measured with
// centered differences at interior samples. Needs a uniform time grid.
DefectReport solution_defect(const SingularSystem& sys, const Trajectory& traj);

void write_csv(std::ostream& os, const Trajectory& traj,
               const std::vector<std::string>& labels);

}  // namespace linsing
