#include "linsing/constraints.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "linsing/errors.hpp"
#include "linsing/numeric.hpp"

namespace linsing {

ConstraintStack::ConstraintStack(SingularSystem sys, double rank_rel_tol)
    : sys_(std::move(sys)), rank_rel_tol_(rank_rel_tol) {}

void ConstraintStack::push_level(const Eigen::MatrixXd& W_prev,
                                 int image_rank) {
  if (frozen_.empty()) {
    // remember the base-point rank of A itself for stencil checks
    base_rank_ = image_rank;
  }
  frozen_.push_back({W_prev, image_rank});
}

Eigen::VectorXd ConstraintStack::level_residual(
    const Level& lv, const Eigen::VectorXd& y) const {
  Eigen::MatrixXd A = sys_.A.eval(y);
  Eigen::VectorXd b = sys_.b.eval_vector(y);
  Eigen::MatrixXd S = A * lv.W_prev;
  RankedSvd svd = ranked_svd(S, rank_rel_tol_, product_noise_floor(A));
  int r = lv.image_rank;  // frozen: keeps the residual smooth in y
  if (r == 0) return b;
  Eigen::MatrixXd Ur = svd.U.leftCols(r);
  return b - Ur * (Ur.transpose() * b);
}

Eigen::VectorXd ConstraintStack::residuals(const Eigen::VectorXd& y) const {
  Eigen::VectorXd out(static_cast<int>(frozen_.size()) * sys_.m);
  for (std::size_t i = 0; i < frozen_.size(); ++i)
    out.segment(static_cast<int>(i) * sys_.m, sys_.m) =
        level_residual(frozen_[i], y);
  return out;
}

Eigen::MatrixXd ConstraintStack::jacobian(const Eigen::VectorXd& y,
                                          double fd_step) const {
  return fd_jacobian([this](const Eigen::VectorXd& p) { return residuals(p); },
                     y, fd_step);
}

Eigen::MatrixXd ConstraintStack::tangent_basis(const Eigen::VectorXd& y,
                                               int dim, double fd_step) const {
  Eigen::MatrixXd J = jacobian(y, fd_step);
  RankedSvd svd = ranked_svd(J, rank_rel_tol_, jacobian_noise_floor(y, fd_step));
  int n = static_cast<int>(J.cols());
  if (dim < 0 || dim > n) throw ShapeError("tangent dimension out of range");
  return svd.V.rightCols(dim);
}

double ConstraintStack::jacobian_noise_floor(const Eigen::VectorXd& y,
                                             double fd_step) const {
  return quotient_noise_floor(sys_.b.eval_vector(y).norm(), fd_step);
}

bool ConstraintStack::rank_unstable_at(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd A = sys_.A.eval(y);
  RankedSvd svd = ranked_svd(A, rank_rel_tol_);
  return base_rank_ >= 0 && svd.rank != base_rank_;
}

const char* to_string(ChainStatus s) {
  switch (s) {
    case ChainStatus::Stabilized: return "stabilized";
    case ChainStatus::Inconsistent: return "inconsistent";
    case ChainStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

std::vector<int> ConstraintChain::dims() const {
  std::vector<int> d;
  d.reserve(levels.size());
  for (const ChainLevel& lv : levels) d.push_back(lv.dim);
  return d;
}

namespace {

// rank of A across the central-difference stencil at x differs anywhere
bool stencil_rank_varies(const SingularSystem& sys, const Eigen::VectorXd& x,
                         int center_rank, double h, double rank_rel_tol) {
  Eigen::VectorXd p = x;
  for (int j = 0; j < sys.n; ++j) {
    for (double s : {+h, -h}) {
      p(j) = x(j) + s;
      RankedSvd svd = ranked_svd(sys.A.eval(p), rank_rel_tol);
      if (svd.rank != center_rank) return true;
    }
    p(j) = x(j);
  }
  return false;
}

}  // namespace

ConstraintChain run_chain(const SingularSystem& sys, const Eigen::VectorXd& x,
                          const ToleranceSet& tol) {
  sys.validate();
  if (x.size() != sys.n) throw ShapeError("point dimension mismatch");
  if (!x.allFinite()) throw NumericError("point has non-finite entries");

  const int n = sys.n;
  const int m = sys.m;
  Eigen::MatrixXd A = sys.A.eval(x);
  Eigen::VectorXd b = sys.b.eval_vector(x);
  if (!A.allFinite() || !b.allFinite())
    throw NumericError("system is non-finite at the point");

  ConstraintChain chain;
  auto stack = std::make_shared<ConstraintStack>(sys, tol.rank_rel);

  chain.levels.push_back({0, 0.0, n, false, 0});
  Eigen::MatrixXd W = Eigen::MatrixXd::Identity(n, n);
  int prev_dim = n;

  const int max_levels = n + 1;
  for (int k = 1; k <= max_levels; ++k) {
    Eigen::MatrixXd S = A * W;
    RankedSvd svd = ranked_svd(S, tol.rank_rel, product_noise_floor(A));
    Eigen::VectorXd resid_vec = b;
    if (svd.rank > 0) {
      Eigen::MatrixXd Ur = svd.U.leftCols(svd.rank);
      resid_vec = b - Ur * (Ur.transpose() * b);
    }
    double residual = resid_vec.norm();
    bool marginal = residual > tol.consistency &&
                    residual <= 10.0 * tol.consistency;

    if (residual > 10.0 * tol.consistency) {
      chain.levels.push_back({k, residual, -1, false, m - svd.rank});
      chain.status = ChainStatus::Inconsistent;
      chain.inconsistent_level = k;
      chain.stack = stack;
      return chain;
    }

    stack->push_level(W, svd.rank);

    if (k == 1 &&
        stencil_rank_varies(sys, x, svd.rank, tol.fd_step, tol.rank_rel))
      chain.rank_unstable = true;

    double floor = stack->jacobian_noise_floor(x, tol.fd_step);
    Eigen::MatrixXd J = stack->jacobian(x, tol.fd_step);
    Eigen::MatrixXd W_next = kernel_basis(J, tol.rank_rel, floor);
    int dim = static_cast<int>(W_next.cols());

    chain.levels.push_back({k, residual, dim, marginal, m - svd.rank});
    chain.subspaces.push_back(W_next);
    W = W_next;

    bool zero_dim_done = dim == 0 && b.norm() <= tol.consistency;
    if (dim == prev_dim || zero_dim_done) {
      chain.status = ChainStatus::Stabilized;
      chain.final_subspace = W_next;
      chain.stack = stack;
      return chain;
    }
    prev_dim = dim;
  }

  chain.status = ChainStatus::MaxIterations;
  chain.stack = stack;
  return chain;
}

Classification classify_point(const SingularSystem& sys,
                              const Eigen::VectorXd& x,
                              const ToleranceSet& tol) {
  Classification c;
  c.chain = run_chain(sys, x, tol);
  c.level_reached = c.chain.length();
  c.on_final = c.chain.status == ChainStatus::Stabilized;
  return c;
}

namespace {

struct ProbeSample {
  int rank = 0;
  int length = 0;
  std::string status;
  bool marginal = false;
  bool unstable = false;
};

ProbeSample probe_one(const SingularSystem& sys, const Eigen::VectorXd& p,
                      const ToleranceSet& tol) {
  ProbeSample s;
  s.rank = ranked_svd(sys.A.eval(p), tol.rank_rel).rank;
  ConstraintChain chain = run_chain(sys, p, tol);
  s.length = chain.length();
  s.status = to_string(chain.status);
  for (const ChainLevel& lv : chain.levels)
    if (lv.marginal) { s.marginal = true; break; }
  s.unstable = chain.rank_unstable;
  return s;
}

}  // namespace

RegularityReport regularity_probe(const SingularSystem& sys,
                                  const Eigen::VectorXd& box_lo,
                                  const Eigen::VectorXd& box_hi, int count,
                                  std::uint64_t seed,
                                  const ToleranceSet& tol, int workers) {
  sys.validate();
  if (box_lo.size() != sys.n || box_hi.size() != sys.n)
    throw ShapeError("box dimension mismatch");

  SampleStream rng(seed);
  std::vector<Eigen::VectorXd> points;
  points.push_back(0.5 * (box_lo + box_hi));
  for (int i = 0; i < count; ++i) points.push_back(rng.box_point(box_lo, box_hi));

  std::vector<ProbeSample> samples(points.size());
  int total = static_cast<int>(points.size());
  workers = std::max(1, std::min(workers, total));
  if (workers == 1) {
    for (int i = 0; i < total; ++i) samples[i] = probe_one(sys, points[i], tol);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1))
          samples[i] = probe_one(sys, points[i], tol);
      });
    for (std::thread& t : pool) t.join();
  }

  RegularityReport rep;
  for (const ProbeSample& s : samples) {
    rep.rank_histogram[s.rank]++;
    rep.length_histogram[s.length]++;
    rep.status_counts[s.status]++;
    if (s.marginal) rep.marginal_points++;
    if (s.unstable) rep.stencil_rank_unstable = true;
  }
  rep.rank_varies = rep.rank_histogram.size() > 1;
  return rep;
}

}  // namespace linsing
