#include "linsing/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "linsing/errors.hpp"
#include "linsing/numeric.hpp"

namespace linsing {

GaugeFn fixed_gauge(const Eigen::VectorXd& coefficients) {
  return [coefficients](double, const Eigen::VectorXd&,
                        const Eigen::MatrixXd& basis) {
    if (basis.cols() != coefficients.size())
      throw ShapeError("gauge coefficient count mismatch");
    return coefficients;
  };
}

Eigen::VectorXd primary_vector(const SingularSystem& sys,
                               const Eigen::VectorXd& x,
                               const ToleranceSet& tol) {
  PointLinearData data = analyze_point(sys, x, tol.rank_rel);
  double scale = std::max(1.0, data.b.norm());
  if (data.consistency_residual > tol.consistency * scale)
    throw InconsistentPoint("b leaves the image of A at the point",
                            data.consistency_residual);
  return data.min_norm_solution;
}

FinalVector final_vector(const SingularSystem& sys, const ConstraintChain& chain,
                         const Eigen::VectorXd& x, const ToleranceSet& tol) {
  if (chain.status != ChainStatus::Stabilized)
    throw NotOnFinal("constraint chain did not stabilize");
  const Eigen::MatrixXd& Wf = chain.final_subspace;
  Eigen::MatrixXd A = sys.A.eval(x);
  Eigen::VectorXd b = sys.b.eval_vector(x);

  FinalVector out;
  if (Wf.cols() == 0) {
    out.u = Eigen::VectorXd::Zero(sys.n);
    out.gauge_basis = Eigen::MatrixXd(sys.n, 0);
    out.residual = b.norm();
    double scale = std::max(1.0, A.norm());
    if (out.residual > tol.consistency * scale)
      throw FinalInconsistency("no motion available on a zero-dimensional set",
                               out.residual);
    return out;
  }

  Eigen::MatrixXd S = A * Wf;
  double floor = product_noise_floor(A);
  RankedSvd svd = ranked_svd(S, tol.rank_rel, floor);
  Eigen::VectorXd c = min_norm_solve(svd, b);
  out.u = Wf * c;
  out.residual = (S * c - b).norm();
  out.gauge_basis = Wf * kernel_basis(S, tol.rank_rel, floor);
  double scale = std::max(1.0, b.norm());
  if (out.residual > tol.consistency * scale)
    throw FinalInconsistency("b leaves the image of A on the final subspace",
                             out.residual);
  return out;
}

Eigen::VectorXd project_to_final(const ConstraintStack& stack,
                                 const Eigen::VectorXd& y,
                                 const ToleranceSet& tol,
                                 double* residual_out) {
  Eigen::VectorXd p = y;
  double res = stack.residuals(p).norm();
  double best = res;
  for (int it = 0; it < 10 && res > tol.projection; ++it) {
    Eigen::MatrixXd J = stack.jacobian(p, tol.fd_step);
    RankedSvd svd =
        ranked_svd(J, tol.rank_rel, stack.jacobian_noise_floor(p, tol.fd_step));
    Eigen::VectorXd r = stack.residuals(p);
    p -= min_norm_solve(svd, r);
    res = stack.residuals(p).norm();
    if (res > 10.0 * best + tol.projection)
      throw ProjectionDiverged("projection residual grew");
    best = std::min(best, res);
  }
  if (residual_out) *residual_out = res;
  return p;
}

namespace {

// Constrained field near a step's base point: velocities live in the
// frozen-dimension tangent space of the accumulated constraint set.
Eigen::VectorXd stage_field(const SingularSystem& sys,
                            const ConstraintStack& stack, int final_dim,
                            const Eigen::VectorXd& gauge_coeff,
                            const Eigen::VectorXd& y, const ToleranceSet& tol) {
  Eigen::MatrixXd T = stack.tangent_basis(y, final_dim, tol.fd_step);
  Eigen::MatrixXd A = sys.A.eval(y);
  Eigen::VectorXd b = sys.b.eval_vector(y);
  Eigen::MatrixXd S = A * T;
  double floor = product_noise_floor(A);
  RankedSvd svd = ranked_svd(S, tol.rank_rel, floor);
  Eigen::VectorXd u = T * min_norm_solve(svd, b);
  if (gauge_coeff.size() > 0) {
    Eigen::MatrixXd G = T * kernel_basis(S, tol.rank_rel, floor);
    if (G.cols() == gauge_coeff.size()) u += G * gauge_coeff;
  }
  return u;
}

}  // namespace

Trajectory integrate(const SingularSystem& sys, const Eigen::VectorXd& x0,
                     const IntegrateOptions& opts) {
  if (opts.step <= 0.0) throw ShapeError("step must be positive");
  const ToleranceSet& tol = opts.tol;

  ConstraintChain chain = run_chain(sys, x0, tol);
  if (chain.status == ChainStatus::Inconsistent)
    throw InconsistentPoint("initial point is inconsistent",
                            chain.levels.back().residual);
  if (chain.status != ChainStatus::Stabilized)
    throw NotOnFinal("constraint chain did not stabilize at the initial point");
  double init_res = chain.stack->residuals(x0).norm();
  double scale = std::max(1.0, sys.b.eval_vector(x0).norm());
  if (init_res > 10.0 * tol.consistency * scale)
    throw NotOnFinal("initial point violates the accumulated constraints");

  int final_dim = static_cast<int>(chain.final_subspace.cols());

  Trajectory traj;
  traj.gauge_dim = 0;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  double t = 0.0;
  Eigen::VectorXd x = x0;
  int steps = static_cast<int>(std::llround(opts.t_end / opts.step));
  if (steps < 1) steps = 1;
  double h = opts.t_end / steps;

  for (int i = 0; i < steps; ++i) {
    // per-step rebuild keeps the frozen data local to the current point
    ConstraintChain local = run_chain(sys, x, tol);
    if (local.status != ChainStatus::Stabilized)
      throw NotOnFinal("left the final constraint set during integration");
    if (static_cast<int>(local.final_subspace.cols()) != final_dim)
      throw NotRegular("final subspace dimension changed along the trajectory");

    FinalVector fv = final_vector(sys, local, x, tol);
    traj.gauge_dim = static_cast<int>(fv.gauge_basis.cols());
    Eigen::VectorXd gc;
    if (opts.gauge) gc = opts.gauge(t, x, fv.gauge_basis);

    const ConstraintStack& stack = *local.stack;
    auto f = [&](const Eigen::VectorXd& y) {
      return stage_field(sys, stack, final_dim, gc, y, tol);
    };
    Eigen::VectorXd x_raw = rk4_step(f, x, h);

    double proj_res = 0.0;
    Eigen::VectorXd x_next = project_to_final(stack, x_raw, tol, &proj_res);

    Eigen::VectorXd mid = 0.5 * (x + x_next);
    Eigen::VectorXd quotient = (x_next - x) / h;
    double defect =
        (sys.A.eval(mid) * quotient - sys.b.eval_vector(mid)).norm();
    if (defect > 1e3 * tol.defect)
      throw StepRejected("step defect exceeds the acceptance bound");

    t += h;
    x = x_next;
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.step_defects.push_back(defect);
    traj.projection_residuals.push_back(proj_res);
  }
  return traj;
}

DefectReport solution_defect(const SingularSystem& sys, const Trajectory& traj) {
  const int N = static_cast<int>(traj.states.size());
  if (N < 3) throw ShapeError("need at least three samples");
  double h = traj.times[1] - traj.times[0];
  for (int i = 1; i + 1 < N; ++i) {
    double hi = traj.times[i + 1] - traj.times[i];
    if (std::abs(hi - h) > 1e-12 * std::max(1.0, std::abs(h)))
      throw ShapeError("time grid is not uniform");
  }

  DefectReport rep;
  rep.order = N >= 5 ? 4 : 2;
  auto eval_defect = [&](int i, const Eigen::VectorXd& v) {
    const Eigen::VectorXd& xi = traj.states[i];
    return (sys.A.eval(xi) * v - sys.b.eval_vector(xi)).norm();
  };

  if (rep.order == 4) {
    for (int i = 2; i <= N - 3; ++i) {
      Eigen::VectorXd v = (-traj.states[i + 2] + 8.0 * traj.states[i + 1] -
                           8.0 * traj.states[i - 1] + traj.states[i - 2]) /
                          (12.0 * h);
      rep.per_sample.push_back(eval_defect(i, v));
    }
  } else {
    for (int i = 1; i <= N - 2; ++i) {
      Eigen::VectorXd v = (traj.states[i + 1] - traj.states[i - 1]) / (2.0 * h);
      rep.per_sample.push_back(eval_defect(i, v));
    }
  }
  for (double d : rep.per_sample) {
    rep.max_defect = std::max(rep.max_defect, d);
    rep.mean_defect += d;
  }
  if (!rep.per_sample.empty())
    rep.mean_defect /= static_cast<double>(rep.per_sample.size());
  return rep;
}

void write_csv(std::ostream& os, const Trajectory& traj,
               const std::vector<std::string>& labels) {
  os << "t";
  for (const std::string& l : labels) os << "," << l;
  os << ",defect,proj_residual\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    os << traj.times[i];
    const Eigen::VectorXd& x = traj.states[i];
    for (int j = 0; j < x.size(); ++j) os << "," << x(j);
    double d = i > 0 ? traj.step_defects[i - 1] : 0.0;
    double p = i > 0 ? traj.projection_residuals[i - 1] : 0.0;
    os << "," << d << "," << p << "\n";
  }
}

}  // namespace linsing
