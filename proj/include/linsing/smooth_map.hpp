#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "linsing/expr.hpp"

namespace linsing {

// Matrix-valued smooth map on R^arity. Two backends:
//  - a grid of expressions (exact derivatives, printable),
//  - an evaluation closure (derivatives by central differences).
// Composed maps produced by the toolkit use the closure backend.
class SmoothMap {
 public:
  using EvalFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  SmoothMap() = default;

  static SmoothMap parse(std::string_view grid_text, int arity);
  // Leading slot 0 is "eps"; x1..xn occupy slots 1..n.
  static SmoothMap parse_with_eps(std::string_view grid_text, int n_base);
  static SmoothMap from_grid(int arity,
                             std::vector<std::vector<Expression>> rows,
                             bool with_eps = false);
  static SmoothMap from_function(int arity, int rows, int cols, EvalFn fn,
                                 double fd_step = 1e-6, bool with_eps = false);
  static SmoothMap identity(int n);    // the map x -> x
  static SmoothMap constant(int arity, const Eigen::MatrixXd& value);

  int arity() const { return arity_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_vector() const { return cols_ == 1; }
  bool has_eps() const { return with_eps_; }
  bool printable() const { return !grid_.empty(); }
  bool empty() const { return rows_ == 0 && cols_ == 0 && arity_ == 0; }

  Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd eval_vector(const Eigen::VectorXd& x) const;

  // Derivative of each entry along an arbitrary seed vector. Exact for
  // expression grids, central finite differences for closures.
  Eigen::MatrixXd directional(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& seed) const;

  // p x arity jacobian; vector-shaped maps only.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  // One rows x cols matrix per input slot: the entrywise partial derivatives.
  std::vector<Eigen::MatrixXd> partials(const Eigen::VectorXd& x) const;

  // Grid text with ';' between rows and ',' between entries.
  std::string str() const;

  const Expression& entry(int r, int c) const;

 private:
  int arity_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  bool with_eps_ = false;
  std::vector<Expression> grid_;  // row-major; empty for closure maps
  EvalFn fn_;
  double fd_step_ = 1e-6;

  void check_input(const Eigen::VectorXd& x) const;
};

}  // namespace linsing
