#include "linsing/report.hpp"

#include <algorithm>

namespace linsing {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Marginal: return "marginal";
    case Verdict::Fail: return "fail";
  }
  return "unknown";
}

Verdict classify_residual(double residual, double tol, double scale) {
  double bound = tol * scale;
  if (residual <= bound) return Verdict::Pass;
  if (residual <= 10.0 * bound) return Verdict::Marginal;
  return Verdict::Fail;
}

Verdict worst(Verdict a, Verdict b) { return a > b ? a : b; }

void ConditionResult::record(const Eigen::VectorXd& x, double residual) {
  samples++;
  mean_residual += (residual - mean_residual) / samples;
  max_residual = std::max(max_residual, residual);
  worst_points.push_back({x, residual});
  std::sort(worst_points.begin(), worst_points.end(),
            [](const SamplePoint& a, const SamplePoint& b) {
              return a.residual > b.residual;
            });
  if (worst_points.size() > 3) worst_points.resize(3);
}

void ConditionResult::finalize(double tol_value, double scale_value) {
  tol = tol_value;
  scale = scale_value;
  verdict = classify_residual(max_residual, tol, scale);
}

void SymmetryReport::finalize() {
  verdict = Verdict::Pass;
  for (const ConditionResult& c : conditions) verdict = worst(verdict, c.verdict);
}

void to_json(nlohmann::json& j, const Verdict& v) { j = to_string(v); }

void to_json(nlohmann::json& j, const SamplePoint& p) {
  j = nlohmann::json{{"x", std::vector<double>(p.x.data(), p.x.data() + p.x.size())},
                     {"residual", p.residual}};
}

void to_json(nlohmann::json& j, const ConditionResult& c) {
  j = nlohmann::json{{"name", c.name},
                     {"max_residual", c.max_residual},
                     {"mean_residual", c.mean_residual},
                     {"scale", c.scale},
                     {"tol", c.tol},
                     {"verdict", c.verdict},
                     {"worst_points", c.worst_points},
                     {"samples", c.samples}};
}

void to_json(nlohmann::json& j, const SymmetryReport& r) {
  j = nlohmann::json{{"kind", r.kind},
                     {"conditions", r.conditions},
                     {"verdict", r.verdict},
                     {"indeterminacy", r.indeterminacy},
                     {"notes", r.notes}};
}

}  // namespace linsing
