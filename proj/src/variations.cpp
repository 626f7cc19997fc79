#include "linsing/variations.hpp"

#include <algorithm>
#include <cmath>

#include "linsing/errors.hpp"

namespace linsing {

namespace {

Eigen::VectorXd with_eps_slot(double eps, const Eigen::VectorXd& x) {
  Eigen::VectorXd z(x.size() + 1);
  z(0) = eps;
  z.tail(x.size()) = x;
  return z;
}

void require_family(const SmoothMap& family) {
  if (!family.has_eps() || !family.is_vector())
    throw ShapeError("expected a one-parameter family of vector maps");
}

}  // namespace

Eigen::VectorXd family_eval(const SmoothMap& family, double eps,
                            const Eigen::VectorXd& x) {
  require_family(family);
  return family.eval(with_eps_slot(eps, x)).col(0);
}

SmoothMap base_map(const SmoothMap& family) {
  require_family(family);
  SmoothMap f = family;
  int n = family.arity() - 1;
  return SmoothMap::from_function(
      n, family.rows(), 1,
      [f](const Eigen::VectorXd& x) {
        return Eigen::MatrixXd(f.eval(with_eps_slot(0.0, x)));
      });
}

Eigen::VectorXd infinitesimal_variation(const SmoothMap& family,
                                        const Eigen::VectorXd& x) {
  require_family(family);
  if (family.printable()) {
    Eigen::VectorXd seed = Eigen::VectorXd::Zero(x.size() + 1);
    seed(0) = 1.0;
    return family.directional(with_eps_slot(0.0, x), seed).col(0);
  }
  // closure data: fourth-order stencil in the parameter slot, stepped to
  // balance truncation against eval noise
  const double h = 1e-3;
  auto at = [&](double e) {
    return Eigen::VectorXd(family.eval(with_eps_slot(e, x)).col(0));
  };
  return Eigen::VectorXd(
      (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h));
}

SmoothMap variation_field(const SmoothMap& family) {
  require_family(family);
  SmoothMap f = family;
  int n = family.arity() - 1;
  return SmoothMap::from_function(
      n, family.rows(), 1, [f](const Eigen::VectorXd& x) {
        return Eigen::MatrixXd(infinitesimal_variation(f, x));
      });
}

SmoothMap compose_families(const SmoothMap& g, const SmoothMap& f) {
  require_family(g);
  require_family(f);
  if (g.arity() - 1 != f.rows())
    throw ShapeError("outer family arity does not match inner family range");
  SmoothMap go = g, fo = f;
  int n = f.arity() - 1;
  return SmoothMap::from_function(
      n + 1, g.rows(), 1,
      [go, fo](const Eigen::VectorXd& ez) {
        double eps = ez(0);
        Eigen::VectorXd inner = fo.eval(ez).col(0);
        return Eigen::MatrixXd(go.eval(with_eps_slot(eps, inner)));
      },
      1e-6, /*with_eps=*/true);
}

Eigen::VectorXd composed_variation(const SmoothMap& g, const SmoothMap& f,
                                   const Eigen::VectorXd& x) {
  require_family(g);
  require_family(f);
  Eigen::VectorXd fx = family_eval(f, 0.0, x);
  Eigen::VectorXd wg = infinitesimal_variation(g, fx);
  Eigen::VectorXd wf = infinitesimal_variation(f, x);
  // base-slice tangent map, taken inside the family so expression-backed
  // data keeps exact derivatives
  return wg +
         g.directional(with_eps_slot(0.0, fx), with_eps_slot(0.0, wf)).col(0);
}

SmoothMap flow_transform_family(const SmoothMap& h0, const SmoothMap& X,
                                const SmoothMap& Y, int substeps) {
  if (!h0.is_vector()) throw ShapeError("base map must be vector valued");
  if (X.arity() != h0.arity() || X.rows() != h0.arity())
    throw ShapeError("source field must live on the source space");
  if (Y.arity() != h0.rows() || Y.rows() != h0.rows())
    throw ShapeError("target field must live on the target space");
  SmoothMap h = h0, Xf = X, Yf = Y;
  int n = h0.arity();
  return SmoothMap::from_function(
      n + 1, h0.rows(), 1,
      [h, Xf, Yf, substeps](const Eigen::VectorXd& ez) {
        double eps = ez(0);
        Eigen::VectorXd x = ez.tail(ez.size() - 1);
        auto fX = [&Xf](const Eigen::VectorXd& p) { return Xf.eval_vector(p); };
        auto fY = [&Yf](const Eigen::VectorXd& p) { return Yf.eval_vector(p); };
        Eigen::VectorXd moved = rk4_flow(fX, x, eps, substeps);
        Eigen::VectorXd imaged = h.eval_vector(moved);
        return Eigen::MatrixXd(rk4_flow(fY, imaged, -eps, substeps));
      },
      1e-6, /*with_eps=*/true);
}

Eigen::VectorXd generalized_lie_derivative(const SmoothMap& h0,
                                           const SmoothMap& X,
                                           const SmoothMap& Y,
                                           const Eigen::VectorXd& x) {
  Eigen::VectorXd Xx = X.eval_vector(x);
  Eigen::VectorXd hx = h0.eval_vector(x);
  return h0.directional(x, Xx).col(0) - Y.eval_vector(hx);
}

InvarianceResult invariance_test(const SmoothMap& h0, const SmoothMap& X,
                                 const SmoothMap& Y, const Eigen::VectorXd& x,
                                 double eps, const ToleranceSet& tol,
                                 int substeps) {
  SmoothMap family = flow_transform_family(h0, X, Y, substeps);
  Eigen::VectorXd here = h0.eval_vector(x);
  InvarianceResult out;
  out.r_eps = (family_eval(family, eps, x) - here).norm();
  out.r_half = (family_eval(family, eps / 2.0, x) - here).norm();
  out.ratio = out.r_half > 0 ? out.r_eps / out.r_half : 0.0;
  double floor = 1e3 * tol.rank_rel;
  out.first_order_vanishes =
      out.r_eps < floor || (out.ratio > 3.0 && out.ratio < 5.0);
  double scale = std::max(1.0, here.norm());
  out.verdict = classify_residual(out.r_eps, tol.defect, scale);
  return out;
}

ProjectabilityResult projectability_test(const SmoothMap& Y,
                                         const SmoothMap& pi,
                                         const std::vector<Eigen::VectorXd>& fiber_points,
                                         const ToleranceSet& tol) {
  if (fiber_points.empty()) throw ShapeError("need at least one probe");
  if (pi.arity() != Y.arity() || Y.rows() != Y.arity())
    throw ShapeError("field and projection must share the total space");

  Eigen::VectorXd base = pi.eval_vector(fiber_points.front());
  ProjectabilityResult out;
  std::vector<Eigen::VectorXd> projected;
  for (const Eigen::VectorXd& z : fiber_points) {
    double off = (pi.eval_vector(z) - base).norm();
    if (off > 1e-8 * std::max(1.0, base.norm()))
      throw ShapeError("probes do not share a fiber");
    projected.push_back(pi.directional(z, Y.eval_vector(z)).col(0));
  }
  out.base_value = projected.front();
  for (const Eigen::VectorXd& v : projected)
    out.max_spread = std::max(out.max_spread, (v - out.base_value).norm());
  double scale = std::max(1.0, out.base_value.norm());
  out.verdict = classify_residual(out.max_spread, tol.consistency, scale);
  return out;
}

SymmetryReport linearity_test(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
    int input_dim, SampleStream& rng, int trials, const ToleranceSet& tol) {
  SymmetryReport rep;
  rep.kind = "linearity";
  ConditionResult zero, add, hom;
  zero.name = "zero_offset";
  add.name = "additivity";
  hom.name = "homogeneity";
  double scale = 1.0;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(input_dim);
  zero.record(z, op(z).norm());

  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd a(input_dim), b(input_dim);
    for (int i = 0; i < input_dim; ++i) {
      a(i) = rng.uniform(-1.0, 1.0);
      b(i) = rng.uniform(-1.0, 1.0);
    }
    Eigen::VectorXd oa = op(a), ob = op(b);
    add.record(a, (op(a + b) - oa - ob).norm());
    for (double lam : {2.0, 0.5, -1.0})
      hom.record(a, (op(lam * a) - lam * oa).norm());
    scale = std::max({scale, oa.norm(), ob.norm()});
  }
  zero.finalize(tol.consistency, scale);
  add.finalize(tol.consistency, scale);
  hom.finalize(tol.consistency, scale);
  rep.conditions = {zero, add, hom};
  rep.finalize();
  return rep;
}

}  // namespace linsing
