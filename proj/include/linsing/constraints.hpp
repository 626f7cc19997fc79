#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <vector>

#include "linsing/system.hpp"

namespace linsing {

// Residual functions accumulated while the chain descends, frozen at the
// base point: level k removes from b(y) its projection onto A(y) * W_{k-1},
// with W_{k-1} and the projector rank taken from the base point. The stack
// extends smoothly off the constraint set, which is what the integrator's
// step projection needs.
class ConstraintStack {
 public:
  ConstraintStack(SingularSystem sys, double rank_rel_tol);

  // Append the level built on admissible subspace W_prev (n x d) whose
  // image A(x) * W_prev had the given rank at the base point.
  void push_level(const Eigen::MatrixXd& W_prev, int image_rank);

  int levels() const { return static_cast<int>(frozen_.size()); }
  int ambient_dim() const { return sys_.n; }

  // Stacked residuals of every accumulated level at y; size m * levels().
  Eigen::VectorXd residuals(const Eigen::VectorXd& y) const;

  // Central-difference jacobian of the stacked residuals.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y, double fd_step) const;

  // Kernel of the stacked jacobian with a frozen dimension; columns are
  // the right singular vectors for the `dim` smallest singular values.
  Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& y, int dim,
                                double fd_step) const;

  // rank of A at y differs from the rank at the base point
  bool rank_unstable_at(const Eigen::VectorXd& y) const;

  // singular values of the FD jacobian below this level are roundoff
  double jacobian_noise_floor(const Eigen::VectorXd& y, double fd_step) const;

  const SingularSystem& system() const { return sys_; }
  double rank_tol() const { return rank_rel_tol_; }

 private:
  struct Level {
    Eigen::MatrixXd W_prev;
    int image_rank;
  };

  Eigen::VectorXd level_residual(const Level& lv,
                                 const Eigen::VectorXd& y) const;

  SingularSystem sys_;
  double rank_rel_tol_;
  int base_rank_ = -1;
  std::vector<Level> frozen_;
};

enum class ChainStatus { Stabilized, Inconsistent, MaxIterations };

const char* to_string(ChainStatus s);

struct ChainLevel {
  int k = 0;
  double residual = 0.0;
  int dim = 0;               // dimension of the admissible subspace W_k
  bool marginal = false;     // residual inside (tol, 10 tol]
  int new_constraints = 0;   // scalar conditions imposed: codim of the
                             // admissible image; the dims drop tells how
                             // many of them cut
};

struct ConstraintChain {
  std::vector<ChainLevel> levels;  // level 0 is the ambient space
  ChainStatus status = ChainStatus::MaxIterations;
  int inconsistent_level = -1;
  Eigen::MatrixXd final_subspace;  // n x d_f, set when stabilized
  std::vector<Eigen::MatrixXd> subspaces;  // W_1, W_2, ... as computed
  bool rank_unstable = false;  // rank of A varied across an FD stencil
  std::shared_ptr<const ConstraintStack> stack;

  int length() const { return levels.back().k; }
  std::vector<int> dims() const;
};

ConstraintChain run_chain(const SingularSystem& sys, const Eigen::VectorXd& x,
                          const ToleranceSet& tol = {});

struct Classification {
  int level_reached = 0;
  bool on_final = false;
  ConstraintChain chain;
};

Classification classify_point(const SingularSystem& sys,
                              const Eigen::VectorXd& x,
                              const ToleranceSet& tol = {});

// Rank and chain behavior over a sample box. The box center is always
// probed along with `count` random points; distinguished points are where
// rank drops tend to sit.
struct RegularityReport {
  std::map<int, int> rank_histogram;
  std::map<int, int> length_histogram;
  std::map<std::string, int> status_counts;
  int marginal_points = 0;
  bool rank_varies = false;
  bool stencil_rank_unstable = false;
  bool flagged() const { return rank_varies || stencil_rank_unstable; }
};

// `workers` threads classify the (pre-generated) samples; results are
// folded in sample order, so the report does not depend on the thread count.
RegularityReport regularity_probe(const SingularSystem& sys,
                                  const Eigen::VectorXd& box_lo,
                                  const Eigen::VectorXd& box_hi, int count,
                                  std::uint64_t seed,
                                  const ToleranceSet& tol = {},
                                  int workers = 1);

}  // namespace linsing
