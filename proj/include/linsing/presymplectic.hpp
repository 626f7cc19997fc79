#pragma once

#include <Eigen/Dense>
#include <vector>

#include "linsing/report.hpp"
#include "linsing/smooth_map.hpp"
#include "linsing/system.hpp"

namespace linsing {

// Hamiltonian picture on the doubled space (x, p). theta carries the
// x-components of the contact form, H the pairing of p with b. omega is
// the full antisymmetrized derivative grid, kept as expressions so the
// lifted system stays printable.
struct LiftedSystem {
  int base_n = 0;
  SmoothMap theta;  // n x 1 over 2n variables
  SmoothMap H;      // 1 x 1 over 2n variables
  SmoothMap omega;  // 2n x 2n over 2n variables

  Eigen::MatrixXd omega_matrix(const Eigen::VectorXd& z) const;

  // max cyclic-sum violation of d omega = 0 over index triples at z
  double closedness_residual(const Eigen::VectorXd& z) const;

  // The lifted equations of motion as a first-order system on (x, p).
  SingularSystem as_singular_system() const;
};

// Build the lift of an expression-backed system. Zero entries of A fold
// away, so sparse systems lift to sparse contact forms.
LiftedSystem lift(const SingularSystem& sys);

// Invariance of theta and H under the cotangent-style action induced by
// (phi, Phi): the momentum slot transforms by the inverse transpose of
// Phi. Points live in the doubled space.
SymmetryReport check_dual_invariance(const SingularSystem& sys,
                                     const SmoothMap& phi, const SmoothMap& Phi,
                                     const std::vector<Eigen::VectorXd>& lifted_points,
                                     const ToleranceSet& tol = {});

}  // namespace linsing
