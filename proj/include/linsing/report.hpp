#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"

namespace linsing {

enum class Verdict { Pass, Marginal, Fail };

const char* to_string(Verdict v);

// residual <= tol * scale passes, <= 10 tol * scale is marginal
Verdict classify_residual(double residual, double tol, double scale);

Verdict worst(Verdict a, Verdict b);

struct SamplePoint {
  Eigen::VectorXd x;
  double residual = 0.0;
};

// One checked condition, aggregated over sample points. `scale` is the
// size of the data the residual is compared against, so verdicts do not
// change when the whole system is multiplied by a constant.
struct ConditionResult {
  std::string name;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double scale = 1.0;
  double tol = 0.0;
  Verdict verdict = Verdict::Pass;
  std::vector<SamplePoint> worst_points;  // up to three, largest first
  int samples = 0;

  void record(const Eigen::VectorXd& x, double residual);
  void finalize(double tol_value, double scale_value);
};

struct SymmetryReport {
  std::string kind;
  std::vector<ConditionResult> conditions;
  Verdict verdict = Verdict::Pass;
  int indeterminacy = 0;  // free parameters in a solved-for object, if any
  std::vector<std::string> notes;

  void finalize();
  bool passed() const { return verdict == Verdict::Pass; }
};

void to_json(nlohmann::json& j, const Verdict& v);
void to_json(nlohmann::json& j, const SamplePoint& p);
void to_json(nlohmann::json& j, const ConditionResult& c);
void to_json(nlohmann::json& j, const SymmetryReport& r);

}  // namespace linsing
