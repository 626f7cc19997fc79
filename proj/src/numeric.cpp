#include "linsing/numeric.hpp"

#include <cmath>
#include <limits>

#include "linsing/errors.hpp"

namespace linsing {

namespace {

// First component whose magnitude clears a relative floor; -1 for a zero
// column.
int first_significant(const Eigen::VectorXd& v) {
  double mx = v.cwiseAbs().maxCoeff();
  if (mx == 0.0) return -1;
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-12 * mx) return i;
  return -1;
}

void flip_to_positive(Eigen::Ref<Eigen::VectorXd> v) {
  int i = first_significant(v);
  if (i >= 0 && v[i] < 0.0) v = -v;
}

}  // namespace

RankedSvd ranked_svd(const Eigen::MatrixXd& M, double rank_rel_tol,
                     double abs_floor) {
  RankedSvd out;
  const int m = static_cast<int>(M.rows());
  const int n = static_cast<int>(M.cols());
  if (m == 0 || n == 0) {
    out.U = Eigen::MatrixXd::Identity(m, m);
    out.V = Eigen::MatrixXd::Identity(n, n);
    out.sigma = Eigen::VectorXd::Zero(std::min(m, n));
    return out;
  }
  if (!M.allFinite()) throw NumericError("matrix has non-finite entries");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  out.sigma = svd.singularValues();

  double smax = out.sigma.size() > 0 ? out.sigma[0] : 0.0;
  double cut = std::max(rank_rel_tol * smax, abs_floor);
  out.rank = 0;
  for (int i = 0; i < out.sigma.size(); ++i)
    if (out.sigma[i] > cut && out.sigma[i] > 0.0) ++out.rank;

  const int paired = static_cast<int>(out.sigma.size());
  for (int i = 0; i < paired; ++i) {
    if (i < out.rank) {
      int lead = first_significant(out.V.col(i));
      if (lead >= 0 && out.V(lead, i) < 0.0) {
        out.V.col(i) = -out.V.col(i);
        out.U.col(i) = -out.U.col(i);
      }
    } else {
      flip_to_positive(out.V.col(i));
      flip_to_positive(out.U.col(i));
    }
  }
  for (int i = paired; i < n; ++i) flip_to_positive(out.V.col(i));
  for (int i = paired; i < m; ++i) flip_to_positive(out.U.col(i));
  return out;
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& M, double rank_rel_tol,
                             double abs_floor) {
  if (M.cols() == 0) return Eigen::MatrixXd::Zero(0, 0);
  RankedSvd svd = ranked_svd(M, rank_rel_tol, abs_floor);
  return svd.V.rightCols(M.cols() - svd.rank);
}

double product_noise_floor(const Eigen::MatrixXd& factor) {
  return 100.0 * std::numeric_limits<double>::epsilon() * factor.norm();
}

double quotient_noise_floor(double value_scale, double step) {
  return 50.0 * std::numeric_limits<double>::epsilon() *
         std::max(1.0, value_scale) / step;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M, double rank_rel_tol) {
  if (M.rows() == 0 || M.cols() == 0)
    return Eigen::MatrixXd::Zero(M.cols(), M.rows());
  RankedSvd svd = ranked_svd(M, rank_rel_tol);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M.cols(), M.rows());
  for (int i = 0; i < svd.rank; ++i)
    out += svd.V.col(i) * (svd.U.col(i).transpose() / svd.sigma[i]);
  return out;
}

Eigen::VectorXd min_norm_solve(const RankedSvd& svd, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(svd.V.rows());
  for (int i = 0; i < svd.rank; ++i)
    out += svd.V.col(i) * (svd.U.col(i).dot(b) / svd.sigma[i]);
  return out;
}

Eigen::MatrixXd fd_jacobian(const VectorFn& f, const Eigen::VectorXd& x,
                            double step) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return Eigen::MatrixXd(f(x).size(), 0);
  Eigen::MatrixXd J;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd hi = x, lo = x;
    hi[j] += step;
    lo[j] -= step;
    Eigen::VectorXd df = (f(hi) - f(lo)) / (2.0 * step);
    if (J.size() == 0) J.resize(df.size(), n);
    J.col(j) = df;
  }
  return J;
}

Eigen::VectorXd rk4_step(const VectorFn& f, const Eigen::VectorXd& x,
                         double dt) {
  Eigen::VectorXd k1 = f(x);
  Eigen::VectorXd k2 = f(x + (dt / 2.0) * k1);
  Eigen::VectorXd k3 = f(x + (dt / 2.0) * k2);
  Eigen::VectorXd k4 = f(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd rk4_flow(const VectorFn& f, Eigen::VectorXd x, double eps,
                         int substeps, double blowup_norm) {
  if (substeps < 1) substeps = 1;
  double dt = eps / substeps;
  for (int i = 0; i < substeps; ++i) {
    x = rk4_step(f, x, dt);
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > blowup_norm)
      throw FlowBlowup("flow left the trusted region after " +
                       std::to_string(i + 1) + " substeps");
  }
  return x;
}

Eigen::VectorXd SampleStream::box_point(const Eigen::VectorXd& lo,
                                        const Eigen::VectorXd& hi) {
  Eigen::VectorXd out(lo.size());
  for (int i = 0; i < lo.size(); ++i) out[i] = uniform(lo[i], hi[i]);
  return out;
}

}  // namespace linsing
