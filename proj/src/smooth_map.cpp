#include "linsing/smooth_map.hpp"

#include <utility>

namespace linsing {

SmoothMap SmoothMap::parse(std::string_view grid_text, int arity) {
  return from_grid(arity, parse_grid(grid_text, arity, false), false);
}

SmoothMap SmoothMap::parse_with_eps(std::string_view grid_text, int n_base) {
  return from_grid(n_base + 1, parse_grid(grid_text, n_base + 1, true), true);
}

SmoothMap SmoothMap::from_grid(int arity,
                               std::vector<std::vector<Expression>> rows,
                               bool with_eps) {
  if (rows.empty()) throw ShapeError("empty expression grid");
  SmoothMap m;
  m.arity_ = arity;
  m.rows_ = static_cast<int>(rows.size());
  m.cols_ = static_cast<int>(rows[0].size());
  m.with_eps_ = with_eps;
  for (auto& row : rows) {
    if (static_cast<int>(row.size()) != m.cols_)
      throw ShapeError("ragged expression grid");
    for (auto& e : row) {
      if (e.min_arity() > arity)
        throw ShapeError("expression references a variable beyond arity " +
                         std::to_string(arity));
      m.grid_.push_back(std::move(e));
    }
  }
  return m;
}

SmoothMap SmoothMap::from_function(int arity, int rows, int cols, EvalFn fn,
                                   double fd_step, bool with_eps) {
  if (rows <= 0 || cols <= 0 || arity < 0)
    throw ShapeError("invalid closure map shape");
  if (with_eps && arity < 1)
    throw ShapeError("a family needs the parameter slot");
  SmoothMap m;
  m.arity_ = arity;
  m.rows_ = rows;
  m.cols_ = cols;
  m.with_eps_ = with_eps;
  m.fn_ = std::move(fn);
  m.fd_step_ = fd_step;
  return m;
}

SmoothMap SmoothMap::identity(int n) {
  std::vector<std::vector<Expression>> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) rows.push_back({Expression::variable(i)});
  return from_grid(n, std::move(rows), false);
}

SmoothMap SmoothMap::constant(int arity, const Eigen::MatrixXd& value) {
  std::vector<std::vector<Expression>> rows(value.rows());
  for (int r = 0; r < value.rows(); ++r)
    for (int c = 0; c < value.cols(); ++c)
      rows[r].push_back(Expression::literal(value(r, c)));
  return from_grid(arity, std::move(rows), false);
}

void SmoothMap::check_input(const Eigen::VectorXd& x) const {
  if (x.size() != arity_)
    throw ShapeError("map of arity " + std::to_string(arity_) +
                     " evaluated on input of size " + std::to_string(x.size()));
}

Eigen::MatrixXd SmoothMap::eval(const Eigen::VectorXd& x) const {
  check_input(x);
  if (!grid_.empty()) {
    Eigen::MatrixXd out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) {
        try {
          out(r, c) = grid_[r * cols_ + c].eval(x.data(),
                                                static_cast<int>(x.size()));
        } catch (const DomainError& e) {
          throw DomainError(e.what(), r, c);
        }
      }
    return out;
  }
  Eigen::MatrixXd out = fn_(x);
  if (out.rows() != rows_ || out.cols() != cols_)
    throw ShapeError("closure map returned a matrix of unexpected shape");
  return out;
}

Eigen::VectorXd SmoothMap::eval_vector(const Eigen::VectorXd& x) const {
  if (cols_ != 1) throw ShapeError("matrix-shaped map used as a vector");
  return eval(x).col(0);
}

Eigen::MatrixXd SmoothMap::directional(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& seed) const {
  check_input(x);
  if (seed.size() != arity_)
    throw ShapeError("seed size does not match map arity");
  if (!grid_.empty()) {
    std::vector<Dual> duals(arity_);
    for (int i = 0; i < arity_; ++i) duals[i] = {x[i], seed[i]};
    Eigen::MatrixXd out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) {
        try {
          out(r, c) = grid_[r * cols_ + c].eval_dual(duals.data(), arity_).d;
        } catch (const DomainError& e) {
          throw DomainError(e.what(), r, c);
        }
      }
    return out;
  }
  double scale = seed.norm();
  if (scale == 0.0) return Eigen::MatrixXd::Zero(rows_, cols_);
  double h = fd_step_ / std::max(1.0, scale);
  Eigen::MatrixXd hi = eval(x + h * seed);
  Eigen::MatrixXd lo = eval(x - h * seed);
  return (hi - lo) / (2.0 * h);
}

Eigen::MatrixXd SmoothMap::jacobian(const Eigen::VectorXd& x) const {
  if (cols_ != 1)
    throw ShapeError("jacobian of a matrix-shaped map; use partials");
  Eigen::MatrixXd J(rows_, arity_);
  for (int j = 0; j < arity_; ++j)
    J.col(j) = directional(x, Eigen::VectorXd::Unit(arity_, j)).col(0);
  return J;
}

std::vector<Eigen::MatrixXd> SmoothMap::partials(
    const Eigen::VectorXd& x) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(arity_);
  for (int j = 0; j < arity_; ++j)
    out.push_back(directional(x, Eigen::VectorXd::Unit(arity_, j)));
  return out;
}

std::string SmoothMap::str() const {
  if (grid_.empty())
    throw ShapeError("closure-backed map has no printable form");
  const auto namer = with_eps_ ? eps_var_name : plain_var_name;
  std::string out;
  for (int r = 0; r < rows_; ++r) {
    if (r > 0) out += "; ";
    for (int c = 0; c < cols_; ++c) {
      if (c > 0) out += ", ";
      out += grid_[r * cols_ + c].str(namer);
    }
  }
  return out;
}

const Expression& SmoothMap::entry(int r, int c) const {
  if (grid_.empty())
    throw ShapeError("closure-backed map has no expression entries");
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw ShapeError("entry index out of range");
  return grid_[r * cols_ + c];
}

}  // namespace linsing
