#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "linsing/numeric.hpp"
#include "linsing/report.hpp"
#include "linsing/smooth_map.hpp"
#include "linsing/system.hpp"

namespace linsing {

// A family is a map with the deformation parameter in slot 0; the base map
// is the slice at parameter zero, the variation its first parameter
// derivative along that slice.

Eigen::VectorXd family_eval(const SmoothMap& family, double eps,
                            const Eigen::VectorXd& x);

SmoothMap base_map(const SmoothMap& family);

Eigen::VectorXd infinitesimal_variation(const SmoothMap& family,
                                        const Eigen::VectorXd& x);

SmoothMap variation_field(const SmoothMap& family);

// (g composed with f) at shared parameter: eps -> g(eps, f(eps, x))
SmoothMap compose_families(const SmoothMap& g, const SmoothMap& f);

// chain rule for the composed variation: w_g after f_0, plus the tangent
// map of g_0 applied to w_f
Eigen::VectorXd composed_variation(const SmoothMap& g, const SmoothMap& f,
                                   const Eigen::VectorXd& x);

// conjugation of h_0 by the flows of X (source) and Y (target):
// eps -> flow_Y(-eps) after h_0 after flow_X(eps)
SmoothMap flow_transform_family(const SmoothMap& h0, const SmoothMap& X,
                                const SmoothMap& Y, int substeps = 64);

// variation of the flow-transform family: Th_0 X - Y after h_0
Eigen::VectorXd generalized_lie_derivative(const SmoothMap& h0,
                                           const SmoothMap& X,
                                           const SmoothMap& Y,
                                           const Eigen::VectorXd& x);

struct InvarianceResult {
  double r_eps = 0.0;    // displacement of the transformed map at eps
  double r_half = 0.0;   // same at eps/2
  double ratio = 0.0;    // r_eps / r_half; near 4 when first order vanishes
  bool first_order_vanishes = false;
  Verdict verdict = Verdict::Pass;
};

InvarianceResult invariance_test(const SmoothMap& h0, const SmoothMap& X,
                                 const SmoothMap& Y, const Eigen::VectorXd& x,
                                 double eps, const ToleranceSet& tol = {},
                                 int substeps = 64);

struct ProjectabilityResult {
  Eigen::VectorXd base_value;  // projected field at the first probe
  double max_spread = 0.0;     // variation across the fiber
  Verdict verdict = Verdict::Pass;
};

// The field Y projects along pi when its pi-image is constant on fibers.
// All probes must share the same base point.
ProjectabilityResult projectability_test(const SmoothMap& Y,
                                         const SmoothMap& pi,
                                         const std::vector<Eigen::VectorXd>& fiber_points,
                                         const ToleranceSet& tol = {});

// Linearity of a finite-dimensional operator: zero offset, additivity on
// random pairs, homogeneity under a few fixed scalings.
SymmetryReport linearity_test(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
    int input_dim, SampleStream& rng, int trials, const ToleranceSet& tol = {});

}  // namespace linsing
