#include "linsing/presymplectic.hpp"

#include <algorithm>
#include <cmath>

#include "linsing/errors.hpp"
#include "linsing/lift_detail.hpp"
#include "linsing/numeric.hpp"

namespace linsing {

Eigen::MatrixXd LiftedSystem::omega_matrix(const Eigen::VectorXd& z) const {
  return omega.eval(z);
}

double LiftedSystem::closedness_residual(const Eigen::VectorXd& z) const {
  const int N = 2 * base_n;
  std::vector<Eigen::MatrixXd> d = omega.partials(z);
  double worst = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      for (int k = j + 1; k < N; ++k) {
        double cyc = d[k](i, j) + d[i](j, k) + d[j](k, i);
        worst = std::max(worst, std::abs(cyc));
      }
  return worst;
}

SingularSystem LiftedSystem::as_singular_system() const {
  const int N = 2 * base_n;
  SingularSystem out;
  out.n = N;
  out.m = N;
  out.name = "lifted";
  // A row i, column j carries omega(e_j, e_i): the transposed grid
  std::vector<Expression> A_rows;
  A_rows.reserve(static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) A_rows.push_back(omega.entry(j, i));
  out.A = SmoothMap::from_grid(N, detail::reshape_rows(A_rows, N, N), false);

  std::vector<Expression> grad;
  grad.reserve(N);
  Expression Hexpr = H.entry(0, 0);
  for (int i = 0; i < N; ++i) grad.push_back(Hexpr.derivative(i));
  out.b = SmoothMap::from_grid(N, detail::reshape_rows(grad, N, 1), false);

  out.labels.reserve(N);
  for (int i = 0; i < base_n; ++i)
    out.labels.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < base_n; ++i)
    out.labels.push_back("p" + std::to_string(i + 1));
  out.validate();
  return out;
}

LiftedSystem lift(const SingularSystem& sys) {
  sys.validate();
  if (!sys.A.printable() || !sys.b.printable())
    throw Error("lift needs an expression-backed system");
  const int n = sys.n;
  const int m = sys.m;
  const int N = 2 * n;

  // theta_i = sum_k p_k A(k, i), H = sum_k p_k b(k); p_k is slot n + k
  std::vector<Expression> theta_entries;
  theta_entries.reserve(n);
  for (int i = 0; i < n; ++i) {
    Expression acc = Expression::literal(0.0);
    for (int k = 0; k < m; ++k)
      acc = acc + Expression::variable(n + k) * sys.A.entry(k, i);
    theta_entries.push_back(acc);
  }
  Expression Hacc = Expression::literal(0.0);
  for (int k = 0; k < m; ++k)
    Hacc = Hacc + Expression::variable(n + k) * sys.b.entry(k, 0);

  // full contact row: x-components then zero p-components
  std::vector<Expression> full;
  full.reserve(N);
  for (int i = 0; i < n; ++i) full.push_back(theta_entries[i]);
  for (int i = 0; i < n; ++i) full.push_back(Expression::literal(0.0));

  std::vector<Expression> omega_entries;
  omega_entries.reserve(static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      omega_entries.push_back(full[i].derivative(j) - full[j].derivative(i));

  LiftedSystem out;
  out.base_n = n;
  out.theta = SmoothMap::from_grid(N, detail::reshape_rows(theta_entries, n, 1),
                                   false);
  out.H = SmoothMap::from_grid(N, detail::reshape_rows({Hacc}, 1, 1), false);
  out.omega = SmoothMap::from_grid(N, detail::reshape_rows(omega_entries, N, N),
                                   false);
  return out;
}

SymmetryReport check_dual_invariance(const SingularSystem& sys,
                                     const SmoothMap& phi, const SmoothMap& Phi,
                                     const std::vector<Eigen::VectorXd>& lifted_points,
                                     const ToleranceSet& tol) {
  LiftedSystem lifted = lift(sys);
  const int n = sys.n;

  SymmetryReport rep;
  rep.kind = "dual_invariance";
  ConditionResult cth, cH;
  cth.name = "contact_form_invariant";
  cH.name = "hamiltonian_invariant";
  double scale = 1.0;

  for (const Eigen::VectorXd& z : lifted_points) {
    if (z.size() != 2 * n) throw ShapeError("lifted point must have 2n entries");
    Eigen::VectorXd x = z.head(n);
    Eigen::VectorXd p = z.tail(n);
    Eigen::VectorXd y = phi.eval_vector(x);
    Eigen::MatrixXd P = Phi.eval(x);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(P.transpose());
    if (!(lu.rcond() > 1e-14))
      throw NumericError("equation-slot map is singular at a sample point");
    Eigen::VectorXd q = lu.solve(p);

    Eigen::VectorXd zy(2 * n);
    zy << y, q;
    Eigen::VectorXd th_here = lifted.theta.eval(z).col(0);
    Eigen::VectorXd th_there = lifted.theta.eval(zy).col(0);
    Eigen::MatrixXd D = phi.jacobian(x);
    cth.record(z, (D.transpose() * th_there - th_here).norm());

    double H_here = lifted.H.eval(z)(0, 0);
    double H_there = lifted.H.eval(zy)(0, 0);
    cH.record(z, std::abs(H_there - H_here));
    scale = std::max({scale, th_here.norm(), std::abs(H_here)});
  }
  cth.finalize(tol.consistency, scale);
  cH.finalize(tol.consistency, scale);
  rep.conditions = {cth, cH};
  rep.finalize();
  return rep;
}

}  // namespace linsing
