#include "linsing/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>

namespace linsing {

struct Expression::Node {
  enum class Kind : std::uint8_t {
    Literal,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,
    Call
  };

  Kind kind;
  double value = 0.0;  // Literal
  int var = -1;        // Variable
  int exponent = 0;    // Pow
  UnaryFn fn = UnaryFn::Sin;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

// Private-access bridge for the free helpers below.
struct ExprAccess {
  static const Expression::NodePtr& root(const Expression& e) {
    return e.root_;
  }
  static Expression wrap(Expression::NodePtr p) {
    return Expression(std::move(p));
  }
};

namespace {

using Node = Expression::Node;
using Kind = Node::Kind;
using NodePtr = std::shared_ptr<const Node>;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Dual dadd(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual dsub(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual dmul(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }

Dual ddiv(Dual a, Dual b) {
  if (b.v == 0.0) throw DomainError("division by zero");
  double q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr literal_node(double v) {
  Node n;
  n.kind = Kind::Literal;
  n.value = v;
  return make_node(std::move(n));
}

NodePtr variable_node(int index) {
  Node n;
  n.kind = Kind::Variable;
  n.var = index;
  return make_node(std::move(n));
}

NodePtr binary_node(Kind k, NodePtr a, NodePtr b) {
  Node n;
  n.kind = k;
  n.a = std::move(a);
  n.b = std::move(b);
  return make_node(std::move(n));
}

NodePtr neg_node(NodePtr a) {
  Node n;
  n.kind = Kind::Neg;
  n.a = std::move(a);
  return make_node(std::move(n));
}

NodePtr pow_node(NodePtr base, int exponent) {
  Node n;
  n.kind = Kind::Pow;
  n.exponent = exponent;
  n.a = std::move(base);
  return make_node(std::move(n));
}

NodePtr call_node(UnaryFn fn, NodePtr a) {
  Node n;
  n.kind = Kind::Call;
  n.fn = fn;
  n.a = std::move(a);
  return make_node(std::move(n));
}

bool is_literal(const NodePtr& p, double v) {
  return p->kind == Kind::Literal && p->value == v;
}

double ipow_value(double base, int k) {
  if (k == 0) return 1.0;
  bool invert = k < 0;
  if (invert && base == 0.0)
    throw DomainError("zero raised to a negative power");
  unsigned long e = invert ? static_cast<unsigned long>(-(long)k)
                           : static_cast<unsigned long>(k);
  double acc = 1.0, sq = base;
  while (e != 0) {
    if (e & 1u) acc *= sq;
    e >>= 1u;
    if (e != 0) sq *= sq;
  }
  return invert ? 1.0 / acc : acc;
}

double eval_node(const Node* n, const double* x, int count) {
  switch (n->kind) {
    case Kind::Literal:
      return n->value;
    case Kind::Variable:
      if (n->var >= count)
        throw ShapeError("variable x" + std::to_string(n->var + 1) +
                         " outside the provided input of size " +
                         std::to_string(count));
      return x[n->var];
    case Kind::Add:
      return eval_node(n->a.get(), x, count) + eval_node(n->b.get(), x, count);
    case Kind::Sub:
      return eval_node(n->a.get(), x, count) - eval_node(n->b.get(), x, count);
    case Kind::Mul:
      return eval_node(n->a.get(), x, count) * eval_node(n->b.get(), x, count);
    case Kind::Div: {
      double num = eval_node(n->a.get(), x, count);
      double den = eval_node(n->b.get(), x, count);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Kind::Neg:
      return -eval_node(n->a.get(), x, count);
    case Kind::Pow:
      return ipow_value(eval_node(n->a.get(), x, count), n->exponent);
    case Kind::Call: {
      double a = eval_node(n->a.get(), x, count);
      switch (n->fn) {
        case UnaryFn::Sin:
          return std::sin(a);
        case UnaryFn::Cos:
          return std::cos(a);
        case UnaryFn::Exp:
          return std::exp(a);
        case UnaryFn::Log:
          if (a <= 0.0) throw DomainError("log of a non-positive value");
          return std::log(a);
        case UnaryFn::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of a negative value");
          return std::sqrt(a);
        case UnaryFn::Tanh:
          return std::tanh(a);
      }
      std::abort();
    }
  }
  std::abort();
}

Dual eval_dual_node(const Node* n, const Dual* x, int count) {
  switch (n->kind) {
    case Kind::Literal:
      return {n->value, 0.0};
    case Kind::Variable:
      if (n->var >= count)
        throw ShapeError("variable x" + std::to_string(n->var + 1) +
                         " outside the provided input of size " +
                         std::to_string(count));
      return x[n->var];
    case Kind::Add:
      return dadd(eval_dual_node(n->a.get(), x, count),
                  eval_dual_node(n->b.get(), x, count));
    case Kind::Sub:
      return dsub(eval_dual_node(n->a.get(), x, count),
                  eval_dual_node(n->b.get(), x, count));
    case Kind::Mul:
      return dmul(eval_dual_node(n->a.get(), x, count),
                  eval_dual_node(n->b.get(), x, count));
    case Kind::Div:
      return ddiv(eval_dual_node(n->a.get(), x, count),
                  eval_dual_node(n->b.get(), x, count));
    case Kind::Neg: {
      Dual a = eval_dual_node(n->a.get(), x, count);
      return {-a.v, -a.d};
    }
    case Kind::Pow: {
      Dual base = eval_dual_node(n->a.get(), x, count);
      int k = n->exponent;
      if (k == 0) return {1.0, 0.0};
      bool invert = k < 0;
      if (invert && base.v == 0.0)
        throw DomainError("zero raised to a negative power");
      unsigned long e = invert ? static_cast<unsigned long>(-(long)k)
                               : static_cast<unsigned long>(k);
      Dual acc{1.0, 0.0}, sq = base;
      while (e != 0) {
        if (e & 1u) acc = dmul(acc, sq);
        e >>= 1u;
        if (e != 0) sq = dmul(sq, sq);
      }
      return invert ? ddiv({1.0, 0.0}, acc) : acc;
    }
    case Kind::Call: {
      Dual a = eval_dual_node(n->a.get(), x, count);
      switch (n->fn) {
        case UnaryFn::Sin:
          return {std::sin(a.v), std::cos(a.v) * a.d};
        case UnaryFn::Cos:
          return {std::cos(a.v), -std::sin(a.v) * a.d};
        case UnaryFn::Exp: {
          double e = std::exp(a.v);
          return {e, e * a.d};
        }
        case UnaryFn::Log:
          if (a.v <= 0.0) throw DomainError("log of a non-positive value");
          return {std::log(a.v), a.d / a.v};
        case UnaryFn::Sqrt: {
          if (a.v < 0.0) throw DomainError("sqrt of a negative value");
          if (a.v == 0.0 && a.d != 0.0)
            throw DomainError("sqrt is not differentiable at zero");
          double s = std::sqrt(a.v);
          return {s, a.d == 0.0 ? 0.0 : a.d / (2.0 * s)};
        }
        case UnaryFn::Tanh: {
          double t = std::tanh(a.v);
          return {t, (1.0 - t * t) * a.d};
        }
      }
      std::abort();
    }
  }
  std::abort();
}

int min_arity_node(const Node* n) {
  switch (n->kind) {
    case Kind::Literal:
      return 0;
    case Kind::Variable:
      return n->var + 1;
    case Kind::Neg:
    case Kind::Pow:
    case Kind::Call:
      return min_arity_node(n->a.get());
    default:
      return std::max(min_arity_node(n->a.get()), min_arity_node(n->b.get()));
  }
}

// Printing. Parenthesization is conservative: non-atomic children of a
// negation or of a power base always get parentheses, so printed text
// reparses to the same tree shape.
enum Prec { PrecAdd = 1, PrecMul = 2, PrecNeg = 3, PrecAtom = 5 };

int prec_of(const Node* n) {
  switch (n->kind) {
    case Kind::Add:
    case Kind::Sub:
      return PrecAdd;
    case Kind::Mul:
    case Kind::Div:
      return PrecMul;
    case Kind::Neg:
      return PrecNeg;
    case Kind::Pow:
      return 4;
    default:
      return PrecAtom;
  }
}

std::string print_node(const Node* n,
                       const std::function<std::string(int)>& var_name);

std::string print_child(const Node* n, int min_prec,
                        const std::function<std::string(int)>& var_name) {
  std::string s = print_node(n, var_name);
  if (prec_of(n) < min_prec) return "(" + s + ")";
  return s;
}

const char* fn_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Sin:
      return "sin";
    case UnaryFn::Cos:
      return "cos";
    case UnaryFn::Exp:
      return "exp";
    case UnaryFn::Log:
      return "log";
    case UnaryFn::Sqrt:
      return "sqrt";
    case UnaryFn::Tanh:
      return "tanh";
  }
  return "?";
}

std::string print_node(const Node* n,
                       const std::function<std::string(int)>& var_name) {
  switch (n->kind) {
    case Kind::Literal:
      return format_double(n->value);
    case Kind::Variable:
      return var_name(n->var);
    case Kind::Add:
      return print_child(n->a.get(), PrecAdd, var_name) + "+" +
             print_child(n->b.get(), PrecAdd, var_name);
    case Kind::Sub:
      return print_child(n->a.get(), PrecAdd, var_name) + "-" +
             print_child(n->b.get(), PrecAdd + 1, var_name);
    case Kind::Mul:
      return print_child(n->a.get(), PrecMul, var_name) + "*" +
             print_child(n->b.get(), PrecMul, var_name);
    case Kind::Div:
      return print_child(n->a.get(), PrecMul, var_name) + "/" +
             print_child(n->b.get(), PrecMul + 1, var_name);
    case Kind::Neg:
      return "-" + print_child(n->a.get(), PrecAtom, var_name);
    case Kind::Pow: {
      std::string base = print_child(n->a.get(), PrecAtom, var_name);
      std::string exp = n->exponent < 0
                            ? "(" + std::to_string(n->exponent) + ")"
                            : std::to_string(n->exponent);
      return base + "^" + exp;
    }
    case Kind::Call:
      return std::string(fn_name(n->fn)) + "(" +
             print_node(n->a.get(), var_name) + ")";
  }
  std::abort();
}

Expression wrap(NodePtr p) { return ExprAccess::wrap(std::move(p)); }

Expression derivative_node(const NodePtr& p, int var) {
  const Node* n = p.get();
  switch (n->kind) {
    case Kind::Literal:
      return Expression::literal(0.0);
    case Kind::Variable:
      return Expression::literal(n->var == var ? 1.0 : 0.0);
    case Kind::Add:
      return derivative_node(n->a, var) + derivative_node(n->b, var);
    case Kind::Sub:
      return derivative_node(n->a, var) - derivative_node(n->b, var);
    case Kind::Mul:
      return derivative_node(n->a, var) * wrap(n->b) +
             wrap(n->a) * derivative_node(n->b, var);
    case Kind::Div:
      return (derivative_node(n->a, var) * wrap(n->b) -
              wrap(n->a) * derivative_node(n->b, var)) /
             Expression::ipow(wrap(n->b), 2);
    case Kind::Neg:
      return -derivative_node(n->a, var);
    case Kind::Pow: {
      if (n->exponent == 0) return Expression::literal(0.0);
      return Expression::literal(static_cast<double>(n->exponent)) *
             Expression::ipow(wrap(n->a), n->exponent - 1) *
             derivative_node(n->a, var);
    }
    case Kind::Call: {
      Expression da = derivative_node(n->a, var);
      Expression a = wrap(n->a);
      switch (n->fn) {
        case UnaryFn::Sin:
          return Expression::call(UnaryFn::Cos, a) * da;
        case UnaryFn::Cos:
          return -(Expression::call(UnaryFn::Sin, a) * da);
        case UnaryFn::Exp:
          return Expression::call(UnaryFn::Exp, a) * da;
        case UnaryFn::Log:
          return da / a;
        case UnaryFn::Sqrt:
          return da / (Expression::literal(2.0) *
                       Expression::call(UnaryFn::Sqrt, a));
        case UnaryFn::Tanh: {
          Expression t = Expression::call(UnaryFn::Tanh, a);
          return (Expression::literal(1.0) - t * t) * da;
        }
      }
      std::abort();
    }
  }
  std::abort();
}

}  // namespace

Expression::Expression() : root_(literal_node(0.0)) {}
Expression::Expression(NodePtr root) : root_(std::move(root)) {}

Expression Expression::literal(double v) { return Expression(literal_node(v)); }

Expression Expression::variable(int index) {
  if (index < 0) throw ShapeError("variable index must be non-negative");
  return Expression(variable_node(index));
}

Expression Expression::call(UnaryFn fn, Expression arg) {
  return Expression(call_node(fn, std::move(arg.root_)));
}

Expression Expression::ipow(Expression base, int exponent) {
  if (exponent == 1) return base;
  if (exponent == 0) return literal(1.0);
  if (base.root_->kind == Node::Kind::Literal && exponent > 0)
    return literal(ipow_value(base.root_->value, exponent));
  return Expression(pow_node(std::move(base.root_), exponent));
}

Expression Expression::operator-() const {
  if (root_->kind == Node::Kind::Literal) return literal(-root_->value);
  if (root_->kind == Node::Kind::Neg) return Expression(root_->a);
  return Expression(neg_node(root_));
}

Expression operator+(const Expression& a, const Expression& b) {
  if (is_literal(a.root_, 0.0)) return b;
  if (is_literal(b.root_, 0.0)) return a;
  if (a.root_->kind == Kind::Literal && b.root_->kind == Kind::Literal)
    return Expression::literal(a.root_->value + b.root_->value);
  return ExprAccess::wrap(binary_node(Kind::Add, a.root_, b.root_));
}

Expression operator-(const Expression& a, const Expression& b) {
  if (is_literal(b.root_, 0.0)) return a;
  if (is_literal(a.root_, 0.0)) return -b;
  if (a.root_->kind == Kind::Literal && b.root_->kind == Kind::Literal)
    return Expression::literal(a.root_->value - b.root_->value);
  return ExprAccess::wrap(binary_node(Kind::Sub, a.root_, b.root_));
}

Expression operator*(const Expression& a, const Expression& b) {
  if (is_literal(a.root_, 0.0) || is_literal(b.root_, 0.0))
    return Expression::literal(0.0);
  if (is_literal(a.root_, 1.0)) return b;
  if (is_literal(b.root_, 1.0)) return a;
  if (is_literal(a.root_, -1.0)) return -b;
  if (is_literal(b.root_, -1.0)) return -a;
  if (a.root_->kind == Kind::Literal && b.root_->kind == Kind::Literal)
    return Expression::literal(a.root_->value * b.root_->value);
  return ExprAccess::wrap(binary_node(Kind::Mul, a.root_, b.root_));
}

Expression operator/(const Expression& a, const Expression& b) {
  if (is_literal(b.root_, 1.0)) return a;
  if (is_literal(a.root_, 0.0) && !is_literal(b.root_, 0.0)) return a;
  if (a.root_->kind == Kind::Literal && b.root_->kind == Kind::Literal &&
      b.root_->value != 0.0)
    return Expression::literal(a.root_->value / b.root_->value);
  return ExprAccess::wrap(binary_node(Kind::Div, a.root_, b.root_));
}

double Expression::eval(const double* x, int n) const {
  return eval_node(root_.get(), x, n);
}

Dual Expression::eval_dual(const Dual* x, int n) const {
  return eval_dual_node(root_.get(), x, n);
}

Expression Expression::derivative(int var) const {
  return derivative_node(root_, var);
}

int Expression::min_arity() const { return min_arity_node(root_.get()); }

bool Expression::is_literal_zero() const { return is_literal(root_, 0.0); }

std::string Expression::str(
    const std::function<std::string(int)>& var_name) const {
  return print_node(root_.get(), var_name);
}

std::string Expression::str() const { return str(plain_var_name); }

std::string plain_var_name(int index) {
  return "x" + std::to_string(index + 1);
}

std::string eps_var_name(int index) {
  if (index == 0) return "eps";
  return "x" + std::to_string(index);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  enum class Type {
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    End
  };
  Type type;
  double number = 0.0;
  bool integral = false;
  std::string ident;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        t.type = Token::Type::End;
        out.push_back(t);
        break;
      }
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        lex_number(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        lex_ident(t);
      } else {
        switch (c) {
          case '+':
            t.type = Token::Type::Plus;
            break;
          case '-':
            t.type = Token::Type::Minus;
            break;
          case '*':
            t.type = Token::Type::Star;
            break;
          case '/':
            t.type = Token::Type::Slash;
            break;
          case '^':
            t.type = Token::Type::Caret;
            break;
          case '(':
            t.type = Token::Type::LParen;
            break;
          case ')':
            t.type = Token::Type::RParen;
            break;
          case ',':
            t.type = Token::Type::Comma;
            break;
          case ';':
            t.type = Token::Type::Semi;
            break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'",
                             line_, column_);
        }
        advance();
      }
      out.push_back(std::move(t));
    }
    return out;
  }

 private:
  void advance() {
    if (pos_ < text_.size() && text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      advance();
  }

  void lex_number(Token& t) {
    size_t start = pos_;
    bool integral = true;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '.') {
        integral = false;
        advance();
      } else if (c == 'e' || c == 'E') {
        size_t look = pos_ + 1;
        if (look < text_.size() && (text_[look] == '+' || text_[look] == '-'))
          ++look;
        if (look < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[look]))) {
          integral = false;
          while (pos_ < look) advance();
          while (pos_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance();
        }
        break;
      } else {
        break;
      }
    }
    std::string_view span = text_.substr(start, pos_ - start);
    double value = 0.0;
    auto res = std::from_chars(span.data(), span.data() + span.size(), value);
    if (res.ec != std::errc() || res.ptr != span.data() + span.size())
      throw ParseError("malformed number '" + std::string(span) + "'", t.line,
                       t.column);
    t.type = Token::Type::Number;
    t.number = value;
    t.integral = integral;
  }

  void lex_ident(Token& t) {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      advance();
    t.type = Token::Type::Ident;
    t.ident = std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, int arity, bool with_eps)
      : tokens_(std::move(tokens)), arity_(arity), with_eps_(with_eps) {}

  std::vector<std::vector<Expression>> grid() {
    std::vector<std::vector<Expression>> rows;
    rows.push_back(row());
    while (peek().type == Token::Type::Semi) {
      next();
      rows.push_back(row());
    }
    expect(Token::Type::End, "end of input");
    for (size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size())
        throw ParseError("row " + std::to_string(r + 1) + " has " +
                             std::to_string(rows[r].size()) +
                             " entries, expected " +
                             std::to_string(rows[0].size()),
                         tokens_.back().line, tokens_.back().column);
    }
    return rows;
  }

  Expression single() {
    Expression e = expr();
    expect(Token::Type::End, "end of input");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  const Token& expect(Token::Type type, const char* what) {
    if (peek().type != type)
      throw ParseError(std::string("expected ") + what, peek().line,
                       peek().column);
    return next();
  }

  std::vector<Expression> row() {
    std::vector<Expression> entries;
    entries.push_back(expr());
    while (peek().type == Token::Type::Comma) {
      next();
      entries.push_back(expr());
    }
    return entries;
  }

  Expression expr() {
    Expression acc = term();
    while (true) {
      if (peek().type == Token::Type::Plus) {
        next();
        acc = raw_binary(Kind::Add, acc, term());
      } else if (peek().type == Token::Type::Minus) {
        next();
        acc = raw_binary(Kind::Sub, acc, term());
      } else {
        return acc;
      }
    }
  }

  Expression term() {
    Expression acc = powexpr();
    while (true) {
      if (peek().type == Token::Type::Star) {
        next();
        acc = raw_binary(Kind::Mul, acc, powexpr());
      } else if (peek().type == Token::Type::Slash) {
        next();
        acc = raw_binary(Kind::Div, acc, powexpr());
      } else {
        return acc;
      }
    }
  }

  // Unary minus binds tighter than '^': -x1^2 parses as (-x1)^2.
  Expression powexpr() {
    Expression base = unary();
    while (peek().type == Token::Type::Caret) {
      next();
      base =
          ExprAccess::wrap(pow_node(ExprAccess::root(base), exponent_literal()));
    }
    return base;
  }

  Expression unary() {
    if (peek().type == Token::Type::Minus) {
      next();
      return ExprAccess::wrap(neg_node(ExprAccess::root(unary())));
    }
    return primary();
  }

  int exponent_literal() {
    bool parens = false;
    if (peek().type == Token::Type::LParen) {
      parens = true;
      next();
    }
    bool negative = false;
    if (peek().type == Token::Type::Minus) {
      negative = true;
      next();
    }
    const Token& t = expect(Token::Type::Number, "an integer exponent");
    if (!t.integral || t.number != std::floor(t.number) ||
        std::abs(t.number) > 1e9)
      throw ParseError("exponent must be an integer literal", t.line,
                       t.column);
    if (parens) expect(Token::Type::RParen, "')'");
    int k = static_cast<int>(t.number);
    return negative ? -k : k;
  }

  Expression primary() {
    const Token& t = peek();
    switch (t.type) {
      case Token::Type::Number: {
        double v = t.number;
        next();
        return Expression::literal(v);
      }
      case Token::Type::LParen: {
        next();
        Expression e = expr();
        expect(Token::Type::RParen, "')'");
        return e;
      }
      case Token::Type::Ident:
        return ident();
      default:
        throw ParseError("expected a value", t.line, t.column);
    }
  }

  Expression ident() {
    Token t = next();
    const std::string& name = t.ident;
    if (auto fn = function_named(name)) {
      expect(Token::Type::LParen, "'(' after function name");
      Expression arg = expr();
      expect(Token::Type::RParen, "')'");
      return ExprAccess::wrap(call_node(*fn, ExprAccess::root(arg)));
    }
    if (name == "pow") {
      expect(Token::Type::LParen, "'(' after function name");
      Expression base = expr();
      expect(Token::Type::Comma, "',' between pow arguments");
      int k = exponent_literal();
      expect(Token::Type::RParen, "')'");
      return ExprAccess::wrap(pow_node(ExprAccess::root(base), k));
    }
    if (with_eps_ && name == "eps") return ExprAccess::wrap(variable_node(0));
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) {
        long index = std::strtol(name.c_str() + 1, nullptr, 10);
        int slots = with_eps_ ? arity_ - 1 : arity_;
        if (index < 1 || index > slots)
          throw ParseError("variable " + name + " outside declared arity " +
                               std::to_string(slots),
                           t.line, t.column);
        return ExprAccess::wrap(
            variable_node(static_cast<int>(index) - 1 + (with_eps_ ? 1 : 0)));
      }
    }
    throw ParseError("unknown identifier '" + name + "'", t.line, t.column);
  }

  static std::optional<UnaryFn> function_named(const std::string& name) {
    if (name == "sin") return UnaryFn::Sin;
    if (name == "cos") return UnaryFn::Cos;
    if (name == "exp") return UnaryFn::Exp;
    if (name == "log") return UnaryFn::Log;
    if (name == "sqrt") return UnaryFn::Sqrt;
    if (name == "tanh") return UnaryFn::Tanh;
    return std::nullopt;
  }

  static Expression raw_binary(Kind k, const Expression& a,
                               const Expression& b) {
    return ExprAccess::wrap(
        binary_node(k, ExprAccess::root(a), ExprAccess::root(b)));
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  int arity_;
  bool with_eps_;
};

}  // namespace

Expression parse_expression(std::string_view text, int arity, bool with_eps) {
  if (arity < 0) throw ShapeError("arity must be non-negative");
  Parser p(Lexer(text).run(), arity, with_eps);
  return p.single();
}

std::vector<std::vector<Expression>> parse_grid(std::string_view text,
                                                int arity, bool with_eps) {
  if (arity < 0) throw ShapeError("arity must be non-negative");
  Parser p(Lexer(text).run(), arity, with_eps);
  return p.grid();
}

}  // namespace linsing
