#include "linsing/system.hpp"

#include "linsing/errors.hpp"

namespace linsing {

void SingularSystem::validate() const {
  if (n <= 0 || m <= 0) throw ShapeError("system dimensions must be positive");
  if (A.rows() != m || A.cols() != n)
    throw ShapeError("A must be " + std::to_string(m) + "x" +
                     std::to_string(n));
  if (A.arity() != n) throw ShapeError("A must depend on n base variables");
  if (b.rows() != m || !b.is_vector())
    throw ShapeError("b must be a vector of size " + std::to_string(m));
  if (b.arity() != n) throw ShapeError("b must depend on n base variables");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw ShapeError("labels must name all n variables");
}

PointLinearData analyze_point(const SingularSystem& sys,
                              const Eigen::VectorXd& x, double rank_rel_tol) {
  if (x.size() != sys.n)
    throw ShapeError("point has size " + std::to_string(x.size()) +
                     ", system base dimension is " + std::to_string(sys.n));
  if (!x.allFinite()) throw NumericError("point has non-finite entries");

  PointLinearData out;
  out.x = x;
  out.A = sys.A.eval(x);
  out.b = sys.b.eval_vector(x);
  if (!out.A.allFinite() || !out.b.allFinite())
    throw NumericError("system data is non-finite at the point");

  RankedSvd svd = ranked_svd(out.A, rank_rel_tol);
  out.singular_values = svd.sigma;
  out.rank = svd.rank;
  out.kernel = svd.V.rightCols(sys.n - svd.rank);
  const Eigen::MatrixXd Ur = svd.U.leftCols(svd.rank);
  out.image_projector = Ur * Ur.transpose();
  out.consistency_residual = (out.b - Ur * (Ur.transpose() * out.b)).norm();
  out.min_norm_solution = min_norm_solve(svd, out.b);
  return out;
}

double consistency_residual(const SingularSystem& sys, const Eigen::VectorXd& x,
                            double rank_rel_tol) {
  return analyze_point(sys, x, rank_rel_tol).consistency_residual;
}

AffineSolutionSet solution_affine_set(const SingularSystem& sys,
                                      const Eigen::VectorXd& x,
                                      const ToleranceSet& tol) {
  PointLinearData data = analyze_point(sys, x, tol.rank_rel);
  if (data.consistency_residual > tol.consistency)
    throw InconsistentPoint(
        "no solution at the point: residual " +
            std::to_string(data.consistency_residual) + " exceeds " +
            std::to_string(tol.consistency),
        data.consistency_residual);
  return {data.min_norm_solution, data.kernel};
}

}  // namespace linsing
