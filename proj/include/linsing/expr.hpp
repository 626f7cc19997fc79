#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "linsing/errors.hpp"

namespace linsing {

// Forward-mode dual number: value and one directional derivative.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

enum class UnaryFn : std::uint8_t { Sin, Cos, Exp, Log, Sqrt, Tanh };

// Immutable scalar expression over variables indexed 0..arity-1. Trees share
// structure, so copies and programmatic composition are cheap.
class Expression {
 public:
  Expression();  // the literal 0

  static Expression literal(double v);
  static Expression variable(int index);
  static Expression call(UnaryFn fn, Expression arg);
  static Expression ipow(Expression base, int exponent);

  // Builders fold literal subtrees and drop zero/one factors structurally.
  // The parser bypasses them, so parsed text keeps its exact shape.
  Expression operator-() const;
  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);

  double eval(const double* x, int n) const;
  Dual eval_dual(const Dual* x, int n) const;

  // Exact derivative as a new tree. Used where a derivative has to stay
  // printable; pointwise derivatives go through eval_dual instead.
  Expression derivative(int var) const;

  // Smallest arity that covers every referenced variable.
  int min_arity() const;

  bool is_literal_zero() const;

  // Printed form reparses to a tree with identical evaluation order.
  std::string str(const std::function<std::string(int)>& var_name) const;
  std::string str() const;  // names variables x1, x2, ...

  // Opaque node type; defined in the implementation file.
  struct Node;

 private:
  using NodePtr = std::shared_ptr<const Node>;
  explicit Expression(NodePtr root);

  NodePtr root_;

  friend struct ExprAccess;
};

// Name for variable slots when a leading eps slot is present: slot 0 is
// "eps", slot k is "x<k>".
std::string eps_var_name(int index);
std::string plain_var_name(int index);

// Parse one expression. Valid identifiers are x1..x<arity> plus, when
// with_eps is set, "eps" bound to slot 0 (x1..x<arity-1> then shift up).
Expression parse_expression(std::string_view text, int arity,
                            bool with_eps = false);

// Parse a grid: rows separated by ';', entries by ','. Rows must agree in
// width. A vector is a grid of single-entry rows.
std::vector<std::vector<Expression>> parse_grid(std::string_view text,
                                                int arity,
                                                bool with_eps = false);

}  // namespace linsing
