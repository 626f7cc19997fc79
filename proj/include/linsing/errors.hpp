#pragma once

#include <stdexcept>
#include <string>

namespace linsing {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the expression and file parsers; carries a 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        reason_(what),
        line_(line),
        column_(column) {}
  // message without the position suffix, for wrapping with a new position
  const std::string& reason() const { return reason_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string reason_;
  int line_;
  int column_;
};

// Evaluation entered an undefined region (log of a non-positive value,
// division by zero, ...). row/col identify the offending grid entry when the
// error surfaced through a map evaluation; both are -1 otherwise.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
  DomainError(const std::string& what, int row, int col)
      : Error(what + " in entry (" + std::to_string(row + 1) + "," +
              std::to_string(col + 1) + ")"),
        row_(row),
        col_(col) {}
  int row() const { return row_; }
  int col() const { return col_; }

 private:
  int row_ = -1;
  int col_ = -1;
};

// Shape or arity mismatch between maps, vectors, and declared dimensions.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what) {}
};

// A numeric result failed a sanity requirement (non-finite entries, singular
// jacobian where an inverse is needed, unexpected rank change, ...).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

// The linear problem at a point has no solution within tolerance.
class InconsistentPoint : public Error {
 public:
  InconsistentPoint(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Point did not reach a stabilized constraint level.
class NotOnFinal : public Error {
 public:
  explicit NotOnFinal(const std::string& what) : Error(what) {}
};

// The reduced problem on the final subspace is unexpectedly unsolvable.
class FinalInconsistency : public Error {
 public:
  FinalInconsistency(const std::string& what, double defect)
      : Error(what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

class ProjectionDiverged : public Error {
 public:
  explicit ProjectionDiverged(const std::string& what) : Error(what) {}
};

class StepRejected : public Error {
 public:
  explicit StepRejected(const std::string& what) : Error(what) {}
};

// A candidate map moved a kernel vector out of the kernel.
class KernelNotPreserved : public Error {
 public:
  explicit KernelNotPreserved(const std::string& what) : Error(what) {}
};

// Preconditions of the specialized checks.
class NotRegular : public Error {
 public:
  explicit NotRegular(const std::string& what) : Error(what) {}
};

class NotConsistent : public Error {
 public:
  explicit NotConsistent(const std::string& what) : Error(what) {}
};

class NotProjectable : public Error {
 public:
  explicit NotProjectable(const std::string& what) : Error(what) {}
};

// A numerically integrated flow left the trusted region.
class FlowBlowup : public Error {
 public:
  explicit FlowBlowup(const std::string& what) : Error(what) {}
};

}  // namespace linsing
