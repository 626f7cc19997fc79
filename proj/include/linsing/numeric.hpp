#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>

namespace linsing {

// Full SVD with a relative rank cut and a deterministic sign convention:
// each right singular vector has its first significant component positive,
// with the paired left vector flipped alongside it.
struct RankedSvd {
  Eigen::MatrixXd U;       // m x m
  Eigen::MatrixXd V;       // n x n
  Eigen::VectorXd sigma;   // min(m, n)
  int rank = 0;
};

// abs_floor discards singular values below an absolute level as well;
// pass a noise floor when M was produced by differencing or cancellation,
// since a purely relative cut cannot assign rank zero to roundoff debris.
RankedSvd ranked_svd(const Eigen::MatrixXd& M, double rank_rel_tol,
                     double abs_floor = 0.0);

// Orthonormal basis of the null space (n x (n - rank)).
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& M, double rank_rel_tol,
                             double abs_floor = 0.0);

// Rounding left in a matrix product with this factor.
double product_noise_floor(const Eigen::MatrixXd& factor);

// Rounding amplified by a central difference quotient at this step.
double quotient_noise_floor(double value_scale, double step);

// Moore-Penrose inverse with the same relative rank cut.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M, double rank_rel_tol);

// Minimum-norm least-squares solution of M u = b.
Eigen::VectorXd min_norm_solve(const RankedSvd& svd, const Eigen::VectorXd& b);

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Central-difference jacobian of a vector function.
Eigen::MatrixXd fd_jacobian(const VectorFn& f, const Eigen::VectorXd& x,
                            double step);

// One classical fourth-order step of dx/dt = f(x).
Eigen::VectorXd rk4_step(const VectorFn& f, const Eigen::VectorXd& x,
                         double dt);

// Integrate dx/ds = f(x) from s = 0 to s = eps in `substeps` equal steps.
// Throws FlowBlowup when the state norm exceeds blowup_norm.
Eigen::VectorXd rk4_flow(const VectorFn& f, Eigen::VectorXd x, double eps,
                         int substeps, double blowup_norm = 1e6);

// Deterministic uniform sampling, identical across platforms for one seed.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : gen_(seed) {}
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  Eigen::VectorXd box_point(const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi);

 private:
  std::mt19937_64 gen_;
};

}  // namespace linsing
