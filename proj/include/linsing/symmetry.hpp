#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "linsing/report.hpp"
#include "linsing/smooth_map.hpp"
#include "linsing/system.hpp"

namespace linsing {

// Transport of the system along a diffeomorphism: the transformed system
// has the mapped trajectories as its solutions. Closure-backed, so the
// result is evaluable but not printable.
SingularSystem pushforward(const SingularSystem& sys, const SmoothMap& phi,
                           const SmoothMap& phi_inv, double fd_step = 1e-6);

// Equivariance of (A, b) under the pair (phi, Phi), where Phi is a matrix
// field acting on the equation slot.
SymmetryReport check_finite_symmetry(const SingularSystem& sys,
                                     const SmoothMap& phi, const SmoothMap& Phi,
                                     const std::vector<Eigen::VectorXd>& points,
                                     const ToleranceSet& tol = {});

// Necessary conditions for phi alone: consistent points map to consistent
// points, kernels map into kernels, and pushed solutions still solve.
SymmetryReport check_D_invariance(const SingularSystem& sys,
                                  const SmoothMap& phi,
                                  const std::vector<Eigen::VectorXd>& points,
                                  const ToleranceSet& tol = {});

struct BundleMap {
  Eigen::MatrixXd Phi;
  double residual_A = 0.0;  // || Phi A - (A after phi) Dphi ||
  double residual_b = 0.0;  // || Phi b - b after phi ||
};

// Pointwise companion matrix for phi: determined on the image of A by the
// intertwining identity, completed on the complement by the best aligned
// orthogonal map. Throws KernelNotPreserved when no companion can exist.
BundleMap construct_bundle_map(const SingularSystem& sys, const SmoothMap& phi,
                               const Eigen::VectorXd& x,
                               const ToleranceSet& tol = {});

struct SolvedGenerator {
  Eigen::MatrixXd B;
  double residual = 0.0;
  int indeterminacy = 0;  // free entries of B left open by the data
};

// Min-norm pointwise solve for the equation-slot generator matching the
// vector field V.
SolvedGenerator solve_generator_matrix(const SingularSystem& sys,
                                       const SmoothMap& V,
                                       const Eigen::VectorXd& x,
                                       const ToleranceSet& tol = {});

// Linearized equivariance for the pair (V, B); with B absent the matrix is
// solved for pointwise and the report carries the solve residual instead.
SymmetryReport check_infinitesimal(const SingularSystem& sys,
                                   const SmoothMap& V, const SmoothMap* B,
                                   const std::vector<Eigen::VectorXd>& points,
                                   const ToleranceSet& tol = {});

struct DynamicTestOptions {
  double t_end = 1.0;
  double step = 1e-2;
  double eps = 0.1;       // flow time when the candidate is a vector field
  int flow_substeps = 64;
  ToleranceSet tol;
};

// Behavioral test: push a computed trajectory through the candidate and
// measure whether the image still solves the system, and whether it tracks
// the trajectory started from the mapped initial point.
SymmetryReport dynamic_symmetry_test(const SingularSystem& sys,
                                     const SmoothMap& candidate,
                                     bool is_infinitesimal,
                                     const Eigen::VectorXd& x0,
                                     const DynamicTestOptions& opts);

// Checks available when A is square and invertible at the samples: the
// companion matrix is forced, and the infinitesimal condition collapses to
// a vanishing commutator with the unique solution field.
SymmetryReport regular_specialize_finite(const SingularSystem& sys,
                                         const SmoothMap& phi,
                                         const std::vector<Eigen::VectorXd>& points,
                                         const ToleranceSet& tol = {});

SymmetryReport regular_specialize_infinitesimal(
    const SingularSystem& sys, const SmoothMap& V,
    const std::vector<Eigen::VectorXd>& points, const ToleranceSet& tol = {});

// Check available at consistent points: brackets of V with the min-norm
// solution field and with tracked kernel directions must stay annihilated
// by A.
SymmetryReport consistent_specialize(const SingularSystem& sys,
                                     const SmoothMap& V,
                                     const Eigen::VectorXd& x0,
                                     const ToleranceSet& tol = {});

// Forward and inverse flow of V for time eps, as evaluable maps.
std::pair<SmoothMap, SmoothMap> flow_pair(const SmoothMap& V, double eps,
                                          int substeps = 64);

}  // namespace linsing
