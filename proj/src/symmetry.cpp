#include "linsing/symmetry.hpp"

#include <algorithm>
#include <cmath>

#include "linsing/dynamics.hpp"
#include "linsing/errors.hpp"
#include "linsing/numeric.hpp"

namespace linsing {

namespace {

Eigen::MatrixXd jacobian_inverse_applied(const SmoothMap& phi,
                                         const Eigen::VectorXd& x,
                                         const Eigen::MatrixXd& A) {
  Eigen::MatrixXd D = phi.jacobian(x);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(D.transpose());
  if (!(lu.rcond() > 1e-14))
    throw NumericError("jacobian of the map is singular at a sample point");
  // A * D^{-1} computed by a transposed solve
  return lu.solve(A.transpose()).transpose();
}

double norm_or_one(double v) { return std::max(1.0, v); }

Eigen::MatrixXd normalized_columns(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd out = M;
  for (int j = 0; j < out.cols(); ++j) {
    double n = out.col(j).norm();
    if (n > 0) out.col(j) /= n;
  }
  return out;
}

}  // namespace

SingularSystem pushforward(const SingularSystem& sys, const SmoothMap& phi,
                           const SmoothMap& phi_inv, double fd_step) {
  sys.validate();
  if (phi.arity() != sys.n || phi.rows() != sys.n || !phi.is_vector())
    throw ShapeError("map must send the state space to itself");
  if (phi_inv.arity() != sys.n || phi_inv.rows() != sys.n)
    throw ShapeError("inverse map must send the state space to itself");

  SingularSystem out;
  out.n = sys.n;
  out.m = sys.m;
  out.name = sys.name.empty() ? "pushforward" : sys.name + "_pushforward";
  out.labels = sys.labels;
  SmoothMap A = sys.A;
  SmoothMap b = sys.b;
  SmoothMap inv = phi_inv;
  SmoothMap fwd = phi;
  out.A = SmoothMap::from_function(
      sys.n, sys.m, sys.n,
      [A, fwd, inv](const Eigen::VectorXd& y) {
        Eigen::VectorXd x = inv.eval_vector(y);
        return jacobian_inverse_applied(fwd, x, A.eval(x));
      },
      fd_step);
  out.b = SmoothMap::from_function(
      sys.n, sys.m, 1,
      [b, inv](const Eigen::VectorXd& y) {
        Eigen::MatrixXd col = b.eval(inv.eval_vector(y));
        return col;
      },
      fd_step);
  return out;
}

SymmetryReport check_finite_symmetry(const SingularSystem& sys,
                                     const SmoothMap& phi, const SmoothMap& Phi,
                                     const std::vector<Eigen::VectorXd>& points,
                                     const ToleranceSet& tol) {
  sys.validate();
  if (Phi.rows() != sys.m || Phi.cols() != sys.m)
    throw ShapeError("equation-slot map must be m by m");
  SymmetryReport rep;
  rep.kind = "finite";
  ConditionResult cb, cA;
  cb.name = "b_equivariance";
  cA.name = "A_equivariance";
  double scale_b = 1.0, scale_A = 1.0;
  for (const Eigen::VectorXd& x : points) {
    Eigen::VectorXd y = phi.eval_vector(x);
    Eigen::MatrixXd P = Phi.eval(x);
    Eigen::MatrixXd Ax = sys.A.eval(x);
    Eigen::MatrixXd Ay = sys.A.eval(y);
    Eigen::VectorXd bx = sys.b.eval_vector(x);
    Eigen::VectorXd by = sys.b.eval_vector(y);
    Eigen::MatrixXd D = phi.jacobian(x);
    cb.record(x, (P * bx - by).norm());
    cA.record(x, (P * Ax - Ay * D).norm());
    scale_b = std::max({scale_b, bx.norm(), by.norm()});
    scale_A = std::max({scale_A, Ax.norm(), (Ay * D).norm()});
  }
  cb.finalize(tol.consistency, scale_b);
  cA.finalize(tol.consistency, scale_A);
  rep.conditions = {cb, cA};
  rep.finalize();
  return rep;
}

SymmetryReport check_D_invariance(const SingularSystem& sys,
                                  const SmoothMap& phi,
                                  const std::vector<Eigen::VectorXd>& points,
                                  const ToleranceSet& tol) {
  sys.validate();
  SymmetryReport rep;
  rep.kind = "domain_invariance";
  ConditionResult cons, ker, sol;
  cons.name = "image_condition_preserved";
  ker.name = "kernel_preserved";
  sol.name = "solutions_related";
  double scale = 1.0;
  int skipped = 0;
  for (const Eigen::VectorXd& x : points) {
    PointLinearData dx = analyze_point(sys, x, tol.rank_rel);
    double local_scale = norm_or_one(dx.b.norm());
    if (dx.consistency_residual > tol.consistency * local_scale) {
      skipped++;
      continue;
    }
    Eigen::VectorXd y = phi.eval_vector(x);
    PointLinearData dy = analyze_point(sys, y, tol.rank_rel);
    Eigen::MatrixXd D = phi.jacobian(x);

    cons.record(x, dy.consistency_residual);
    if (dx.kernel.cols() > 0) {
      Eigen::MatrixXd pushed = normalized_columns(D * dx.kernel);
      ker.record(x, (dy.A * pushed).norm());
    } else {
      ker.record(x, 0.0);
    }
    sol.record(x, (dy.A * (D * dx.min_norm_solution) - dy.b).norm());
    scale = std::max({scale, dx.A.norm(), dy.A.norm(), dx.b.norm(), dy.b.norm()});
  }
  cons.finalize(tol.consistency, scale);
  ker.finalize(tol.consistency, scale);
  sol.finalize(tol.consistency, scale);
  rep.conditions = {cons, ker, sol};
  if (skipped > 0)
    rep.notes.push_back(std::to_string(skipped) +
                        " sample(s) skipped: not consistent");
  rep.finalize();
  return rep;
}

BundleMap construct_bundle_map(const SingularSystem& sys, const SmoothMap& phi,
                               const Eigen::VectorXd& x,
                               const ToleranceSet& tol) {
  sys.validate();
  Eigen::VectorXd y = phi.eval_vector(x);
  Eigen::MatrixXd Ax = sys.A.eval(x);
  Eigen::MatrixXd Ay = sys.A.eval(y);
  Eigen::MatrixXd D = phi.jacobian(x);

  RankedSvd sx = ranked_svd(Ax, tol.rank_rel);
  RankedSvd sy = ranked_svd(Ay, tol.rank_rel);
  if (sx.rank != sy.rank)
    throw KernelNotPreserved("rank of A differs between the point and its image");
  int r = sx.rank;

  // existence requires Dphi to map ker A into ker A at the image
  if (sx.V.cols() - r > 0) {
    Eigen::MatrixXd K = sx.V.rightCols(sys.n - r);
    double leak = (Ay * normalized_columns(D * K)).norm();
    double scale = norm_or_one(Ay.norm());
    if (leak > 10.0 * tol.consistency * scale)
      throw KernelNotPreserved("kernel directions leave the kernel under the map");
  }

  // determined part: intertwines A with (A after phi) Dphi on the image
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(sys.m, sys.m);
  for (int i = 0; i < r; ++i)
    Phi += (Ay * D * sx.V.col(i)) * sx.U.col(i).transpose() / sx.sigma(i);

  // complement part: orthogonal alignment of the cokernel frames
  int q = sys.m - r;
  if (q > 0) {
    Eigen::MatrixXd Cx = sx.U.rightCols(q);
    Eigen::MatrixXd Cy = sy.U.rightCols(q);
    Eigen::JacobiSVD<Eigen::MatrixXd> polar(Cy.transpose() * Cx,
                                            Eigen::ComputeThinU |
                                                Eigen::ComputeThinV);
    Eigen::MatrixXd Omega = polar.matrixU() * polar.matrixV().transpose();
    Phi += Cy * Omega * Cx.transpose();
  }

  BundleMap out;
  out.Phi = Phi;
  out.residual_A = (Phi * Ax - Ay * D).norm();
  out.residual_b = (Phi * sys.b.eval_vector(x) - sys.b.eval_vector(y)).norm();
  return out;
}

SolvedGenerator solve_generator_matrix(const SingularSystem& sys,
                                       const SmoothMap& V,
                                       const Eigen::VectorXd& x,
                                       const ToleranceSet& tol) {
  sys.validate();
  if (V.arity() != sys.n || V.rows() != sys.n || !V.is_vector())
    throw ShapeError("vector field must match the state dimension");
  Eigen::VectorXd a = V.eval_vector(x);
  Eigen::MatrixXd A = sys.A.eval(x);
  Eigen::VectorXd b = sys.b.eval_vector(x);
  Eigen::MatrixXd Da = V.jacobian(x);
  Eigen::MatrixXd Db_a = sys.b.directional(x, a);   // m x 1
  Eigen::MatrixXd DA_a = sys.A.directional(x, a);   // m x n

  Eigen::MatrixXd M(sys.m, 1 + sys.n);
  M.col(0) = b;
  M.rightCols(sys.n) = A;
  Eigen::MatrixXd R(sys.m, 1 + sys.n);
  R.col(0) = Db_a.col(0);
  R.rightCols(sys.n) = A * Da + DA_a;

  // B M = R, min-norm in B: B = R M^+
  RankedSvd svd = ranked_svd(M, tol.rank_rel);
  Eigen::MatrixXd Mp = pseudo_inverse(M, tol.rank_rel);
  SolvedGenerator out;
  out.B = R * Mp;
  out.residual = (out.B * M - R).norm();
  out.indeterminacy = sys.m * (sys.m - svd.rank);
  return out;
}

SymmetryReport check_infinitesimal(const SingularSystem& sys,
                                   const SmoothMap& V, const SmoothMap* B,
                                   const std::vector<Eigen::VectorXd>& points,
                                   const ToleranceSet& tol) {
  sys.validate();
  SymmetryReport rep;
  rep.kind = "infinitesimal";
  double scale = 1.0;
  if (B) {
    if (B->rows() != sys.m || B->cols() != sys.m)
      throw ShapeError("generator matrix field must be m by m");
    ConditionResult cb, cA;
    cb.name = "b_direction";
    cA.name = "A_direction";
    for (const Eigen::VectorXd& x : points) {
      Eigen::VectorXd a = V.eval_vector(x);
      Eigen::MatrixXd Bm = B->eval(x);
      Eigen::MatrixXd A = sys.A.eval(x);
      Eigen::VectorXd b = sys.b.eval_vector(x);
      Eigen::MatrixXd Da = V.jacobian(x);
      Eigen::VectorXd db = sys.b.directional(x, a).col(0);
      Eigen::MatrixXd dA = sys.A.directional(x, a);
      cb.record(x, (Bm * b - db).norm());
      cA.record(x, (Bm * A - A * Da - dA).norm());
      scale = std::max({scale, A.norm(), b.norm()});
    }
    cb.finalize(tol.consistency, scale);
    cA.finalize(tol.consistency, scale);
    rep.conditions = {cb, cA};
  } else {
    ConditionResult solv;
    solv.name = "generator_solvable";
    int indet = 0;
    for (const Eigen::VectorXd& x : points) {
      SolvedGenerator g = solve_generator_matrix(sys, V, x, tol);
      solv.record(x, g.residual);
      indet = std::max(indet, g.indeterminacy);
      scale = std::max({scale, sys.A.eval(x).norm(), sys.b.eval_vector(x).norm()});
    }
    solv.finalize(tol.consistency, scale);
    rep.conditions = {solv};
    rep.indeterminacy = indet;
    if (indet > 0)
      rep.notes.push_back("generator matrix underdetermined: " +
                          std::to_string(indet) + " free entries");
  }
  rep.finalize();
  return rep;
}

SymmetryReport dynamic_symmetry_test(const SingularSystem& sys,
                                     const SmoothMap& candidate,
                                     bool is_infinitesimal,
                                     const Eigen::VectorXd& x0,
                                     const DynamicTestOptions& opts) {
  sys.validate();
  IntegrateOptions iopts;
  iopts.step = opts.step;
  iopts.t_end = opts.t_end;
  iopts.tol = opts.tol;
  Trajectory base = integrate(sys, x0, iopts);

  auto apply = [&](const Eigen::VectorXd& p) {
    if (!is_infinitesimal) return candidate.eval_vector(p);
    auto f = [&](const Eigen::VectorXd& q) { return candidate.eval_vector(q); };
    return rk4_flow(f, p, opts.eps, opts.flow_substeps);
  };

  Trajectory mapped;
  mapped.times = base.times;
  for (const Eigen::VectorXd& p : base.states) mapped.states.push_back(apply(p));

  DefectReport defect = solution_defect(sys, mapped);
  double scale = 1.0;
  for (const Eigen::VectorXd& p : mapped.states)
    scale = std::max(scale, sys.b.eval_vector(p).norm());

  SymmetryReport rep;
  rep.kind = is_infinitesimal ? "dynamic_infinitesimal" : "dynamic_finite";
  ConditionResult cd;
  cd.name = "mapped_curve_defect";
  cd.record(mapped.states.front(), defect.max_defect);
  cd.finalize(opts.tol.defect, scale);
  rep.conditions.push_back(cd);

  Trajectory shadow = integrate(sys, mapped.states.front(), iopts);
  ConditionResult ce;
  ce.name = "endpoint_agreement";
  double gap = (shadow.states.back() - mapped.states.back()).norm();
  ce.record(mapped.states.front(), gap);
  ce.finalize(opts.tol.defect, norm_or_one(shadow.states.back().norm()));
  rep.conditions.push_back(ce);
  rep.finalize();
  return rep;
}

SymmetryReport regular_specialize_finite(const SingularSystem& sys,
                                         const SmoothMap& phi,
                                         const std::vector<Eigen::VectorXd>& points,
                                         const ToleranceSet& tol) {
  sys.validate();
  if (sys.m != sys.n)
    throw NotRegular("square system required");
  SymmetryReport rep;
  rep.kind = "finite_regular";
  ConditionResult cb;
  cb.name = "forced_companion_b_equivariance";
  double scale = 1.0;
  for (const Eigen::VectorXd& x : points) {
    Eigen::MatrixXd Ax = sys.A.eval(x);
    RankedSvd sx = ranked_svd(Ax, tol.rank_rel);
    if (sx.rank != sys.n)
      throw NotRegular("A is singular at a sample point");
    Eigen::VectorXd y = phi.eval_vector(x);
    Eigen::MatrixXd Ay = sys.A.eval(y);
    Eigen::MatrixXd D = phi.jacobian(x);
    // the only candidate companion: (A after phi) Dphi A^{-1}
    Eigen::MatrixXd Phi = Ay * D * Ax.inverse();
    cb.record(x, (Phi * sys.b.eval_vector(x) - sys.b.eval_vector(y)).norm());
    scale = std::max({scale, sys.b.eval_vector(x).norm(),
                      sys.b.eval_vector(y).norm()});
  }
  cb.finalize(tol.consistency, scale);
  rep.conditions = {cb};
  rep.finalize();
  return rep;
}

SymmetryReport regular_specialize_infinitesimal(
    const SingularSystem& sys, const SmoothMap& V,
    const std::vector<Eigen::VectorXd>& points, const ToleranceSet& tol) {
  sys.validate();
  if (sys.m != sys.n)
    throw NotRegular("square system required");
  SymmetryReport rep;
  rep.kind = "infinitesimal_regular";
  ConditionResult cc;
  cc.name = "commutator_with_solution_field";
  double scale = 1.0;
  for (const Eigen::VectorXd& x : points) {
    Eigen::MatrixXd A = sys.A.eval(x);
    RankedSvd svd = ranked_svd(A, tol.rank_rel);
    if (svd.rank != sys.n)
      throw NotRegular("A is singular at a sample point");
    Eigen::VectorXd b = sys.b.eval_vector(x);
    Eigen::VectorXd X = A.partialPivLu().solve(b);
    Eigen::VectorXd a = V.eval_vector(x);
    Eigen::MatrixXd Da = V.jacobian(x);

    // DX column j from differentiating A X = b in direction e_j
    Eigen::MatrixXd DX(sys.n, sys.n);
    std::vector<Eigen::MatrixXd> dA = sys.A.partials(x);
    Eigen::MatrixXd Db = sys.b.jacobian(x);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    for (int j = 0; j < sys.n; ++j)
      DX.col(j) = lu.solve(Db.col(j) - dA[j] * X);

    Eigen::VectorXd bracket = DX * a - Da * X;
    cc.record(x, bracket.norm());
    scale = std::max({scale, X.norm(), a.norm()});
  }
  cc.finalize(tol.consistency, scale);
  rep.conditions = {cc};
  rep.finalize();
  return rep;
}

SymmetryReport consistent_specialize(const SingularSystem& sys,
                                     const SmoothMap& V,
                                     const Eigen::VectorXd& x0,
                                     const ToleranceSet& tol) {
  sys.validate();
  PointLinearData d0 = analyze_point(sys, x0, tol.rank_rel);
  double scale0 = norm_or_one(d0.b.norm());
  if (d0.consistency_residual > tol.consistency * scale0)
    throw NotConsistent("base point is not consistent");

  Eigen::MatrixXd K0 = d0.kernel;

  auto min_norm_field = [&](const Eigen::VectorXd& y) {
    PointLinearData d = analyze_point(sys, y, tol.rank_rel);
    return d.min_norm_solution;
  };
  // kernel frame transported by projection onto the local kernel
  auto kernel_frame = [&](const Eigen::VectorXd& y) {
    PointLinearData d = analyze_point(sys, y, tol.rank_rel);
    if (d.kernel.cols() != K0.cols())
      throw NotRegular("kernel dimension changed near the base point");
    Eigen::MatrixXd P = d.kernel * d.kernel.transpose();
    Eigen::MatrixXd M = P * K0;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd Q = qr.householderQ() *
                        Eigen::MatrixXd::Identity(sys.n, K0.cols());
    return Q;
  };

  Eigen::VectorXd a = V.eval_vector(x0);
  Eigen::MatrixXd Da = V.jacobian(x0);
  Eigen::MatrixXd A = d0.A;
  double h = tol.fd_step / norm_or_one(a.norm());

  auto bracket_with = [&](const std::function<Eigen::VectorXd(
                              const Eigen::VectorXd&)>& field) {
    Eigen::VectorXd fwd = field(x0 + h * a);
    Eigen::VectorXd bwd = field(x0 - h * a);
    Eigen::VectorXd DYa = (fwd - bwd) / (2.0 * h);
    return Eigen::VectorXd(DYa - Da * field(x0));
  };

  SymmetryReport rep;
  rep.kind = "infinitesimal_consistent";
  ConditionResult cx;
  cx.name = "bracket_with_min_norm_field";
  cx.record(x0, (A * bracket_with(min_norm_field)).norm());
  double scale = std::max({1.0, A.norm(), d0.b.norm(), a.norm()});
  cx.finalize(tol.consistency, scale);
  rep.conditions.push_back(cx);

  if (K0.cols() > 0) {
    ConditionResult ck;
    ck.name = "bracket_with_kernel_directions";
    for (int mu = 0; mu < K0.cols(); ++mu) {
      auto gamma = [&, mu](const Eigen::VectorXd& y) {
        return Eigen::VectorXd(kernel_frame(y).col(mu));
      };
      ck.record(x0, (A * bracket_with(gamma)).norm());
    }
    ck.finalize(tol.consistency, scale);
    rep.conditions.push_back(ck);
  }
  rep.finalize();
  return rep;
}

std::pair<SmoothMap, SmoothMap> flow_pair(const SmoothMap& V, double eps,
                                          int substeps) {
  if (!V.is_vector() || V.arity() != V.rows())
    throw ShapeError("flow needs a vector field on its own space");
  int n = V.arity();
  SmoothMap field = V;
  auto advect = [field, substeps](const Eigen::VectorXd& x, double t) {
    auto f = [&field](const Eigen::VectorXd& y) { return field.eval_vector(y); };
    return Eigen::MatrixXd(rk4_flow(f, x, t, substeps));
  };
  SmoothMap fwd = SmoothMap::from_function(
      n, n, 1, [advect, eps](const Eigen::VectorXd& x) { return advect(x, eps); });
  SmoothMap bwd = SmoothMap::from_function(
      n, n, 1, [advect, eps](const Eigen::VectorXd& x) { return advect(x, -eps); });
  return {fwd, bwd};
}

}  // namespace linsing
