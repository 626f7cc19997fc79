#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "linsing/constraints.hpp"
#include "linsing/dynamics.hpp"
#include "linsing/errors.hpp"
#include "linsing/presymplectic.hpp"
#include "linsing/symmetry.hpp"
#include "linsing/sysfile.hpp"
#include "linsing/variations.hpp"

namespace {

using nlohmann::json;
using namespace linsing;

// exit codes: 0 pass, 1 check failed, 2 bad input, 3 regularity flagged,
// 4 point not on the final constraint set, 5 marginal verdicts only
constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kBadInput = 2;
constexpr int kFlagged = 3;
constexpr int kOffFinal = 4;
constexpr int kMarginal = 5;

struct CommonOpts {
  std::string system_path;
  std::string output;
  double tol_rank = 1e-9;
  double tol_consistency = 1e-7;
  double fd_step = 1e-6;
  double tol_defect = 1e-4;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("system", c.system_path, "system description file")
      ->required();
  cmd->add_option("--output", c.output, "write the result here instead of stdout");
  cmd->add_option("--tol-rank", c.tol_rank, "relative rank cutoff");
  cmd->add_option("--tol", c.tol_consistency, "consistency tolerance");
  cmd->add_option("--fd-step", c.fd_step, "finite difference step");
  cmd->add_option("--tol-defect", c.tol_defect, "trajectory defect tolerance");
}

ToleranceSet tolerances(const CommonOpts& c) {
  ToleranceSet tol;
  tol.rank_rel = c.tol_rank;
  tol.consistency = c.tol_consistency;
  tol.fd_step = c.fd_step;
  tol.defect = c.tol_defect;
  return tol;
}

// wraps failures while reading user-supplied files so main can map every
// one of them to the bad-input exit code
struct InputError {
  std::string message;
};

SingularSystem read_system(const std::string& path) {
  try {
    return load_system(path);
  } catch (const Error& e) {
    throw InputError{e.what()};
  }
}

CandidateSet read_candidates(const std::string& path, int n, int m) {
  try {
    return load_candidates(path, n, m);
  } catch (const Error& e) {
    throw InputError{e.what()};
  }
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = std::stod(item, &used);
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
      ++used;
    if (used != item.size()) throw std::invalid_argument("trailing characters");
    vals.push_back(v);
  }
  if (vals.empty()) throw std::invalid_argument("empty vector");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error("cannot open output file: " + path);
  os << text << "\n";
}

json to_json_vec(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json chain_to_json(const ConstraintChain& chain) {
  json levels = json::array();
  for (const ChainLevel& lv : chain.levels)
    levels.push_back({{"k", lv.k},
                      {"residual", lv.residual},
                      {"dim", lv.dim},
                      {"marginal", lv.marginal},
                      {"new_constraints", lv.new_constraints}});
  return {{"dims", chain.dims()},
          {"status", to_string(chain.status)},
          {"levels", levels},
          {"inconsistent_level", chain.inconsistent_level},
          {"rank_unstable", chain.rank_unstable}};
}

json probe_to_json(const RegularityReport& rep) {
  json rank_hist = json::object(), len_hist = json::object();
  for (auto& [k, v] : rep.rank_histogram) rank_hist[std::to_string(k)] = v;
  for (auto& [k, v] : rep.length_histogram) len_hist[std::to_string(k)] = v;
  return {{"rank_histogram", rank_hist},
          {"length_histogram", len_hist},
          {"status_counts", rep.status_counts},
          {"marginal_points", rep.marginal_points},
          {"rank_varies", rep.rank_varies},
          {"stencil_rank_unstable", rep.stencil_rank_unstable},
          {"flagged", rep.flagged()}};
}

bool chain_has_marginal(const ConstraintChain& chain) {
  for (const ChainLevel& lv : chain.levels)
    if (lv.marginal) return true;
  return false;
}

std::vector<std::string> state_labels(const SingularSystem& sys) {
  if (!sys.labels.empty()) return sys.labels;
  std::vector<std::string> out;
  for (int i = 1; i <= sys.n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

std::vector<Eigen::VectorXd> seeded_box(int dim, double half_width, int count,
                                        std::uint64_t seed) {
  SampleStream rng(seed);
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -half_width);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, half_width);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < count; ++i) pts.push_back(rng.box_point(lo, hi));
  return pts;
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return kPass;
    case Verdict::Marginal: return kMarginal;
    case Verdict::Fail: return kFail;
  }
  return kFail;
}

int run_analyze(const CommonOpts& common, const std::string& x0_text,
                int samples, double box, std::uint64_t seed, int workers) {
  SingularSystem sys = read_system(common.system_path);
  ToleranceSet tol = tolerances(common);
  Eigen::VectorXd x0 = x0_text.empty() ? Eigen::VectorXd::Zero(sys.n)
                                       : parse_vector(x0_text);
  if (x0.size() != sys.n) throw ShapeError("--x0 needs " + std::to_string(sys.n) + " entries");

  ConstraintChain chain = run_chain(sys, x0, tol);
  json out = {{"system", sys.name},
              {"point", to_json_vec(x0)},
              {"chain", chain_to_json(chain)}};

  bool flagged = chain.rank_unstable;
  bool marginal = chain_has_marginal(chain);
  if (samples > 0) {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(sys.n, -box);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(sys.n, box);
    RegularityReport rep = regularity_probe(sys, lo, hi, samples, seed, tol, workers);
    out["probe"] = probe_to_json(rep);
    flagged = flagged || rep.flagged();
    marginal = marginal || rep.marginal_points > 0;
  }
  emit(out.dump(2), common.output);

  if (flagged) return kFlagged;
  if (chain.status == ChainStatus::Inconsistent) return kFail;
  if (chain.status == ChainStatus::MaxIterations) return kFail;
  if (marginal) return kMarginal;
  return kPass;
}

int run_integrate(const CommonOpts& common, const std::string& x0_text,
                  double t_end, double step, const std::string& gauge_text) {
  SingularSystem sys = read_system(common.system_path);
  IntegrateOptions opts;
  opts.t_end = t_end;
  opts.step = step;
  opts.tol = tolerances(common);
  if (!gauge_text.empty()) opts.gauge = fixed_gauge(parse_vector(gauge_text));

  Eigen::VectorXd x0 = parse_vector(x0_text);
  if (x0.size() != sys.n) throw ShapeError("--x0 needs " + std::to_string(sys.n) + " entries");

  Trajectory traj = integrate(sys, x0, opts);
  DefectReport defect = solution_defect(sys, traj);

  double max_proj = 0.0;
  for (double p : traj.projection_residuals) max_proj = std::max(max_proj, p);

  json out = {{"system", sys.name},
              {"steps", traj.states.size() - 1},
              {"t_end", traj.times.back()},
              {"gauge_dim", traj.gauge_dim},
              {"final_state", to_json_vec(traj.states.back())},
              {"max_defect", defect.max_defect},
              {"mean_defect", defect.mean_defect},
              {"defect_order", defect.order},
              {"max_projection_residual", max_proj}};
  std::cout << out.dump(2) << "\n";

  if (!common.output.empty()) {
    std::ofstream os(common.output);
    if (!os) throw Error("cannot open output file: " + common.output);
    write_csv(os, traj, state_labels(sys));
  }
  return kPass;
}

int run_check(const CommonOpts& common, const std::string& candidate_path,
              const std::string& kind, int samples, double box,
              std::uint64_t seed, const std::string& x0_text, double eps,
              double t_end, double step) {
  SingularSystem sys = read_system(common.system_path);
  ToleranceSet tol = tolerances(common);
  CandidateSet cs = read_candidates(candidate_path, sys.n, sys.m);

  auto need = [&](const std::optional<SmoothMap>& obj, const char* name) -> const SmoothMap& {
    if (!obj) throw ShapeError(std::string("check '") + kind + "' needs a '" +
                               name + "' entry in the candidate file");
    return *obj;
  };

  SymmetryReport rep;
  if (kind == "finite") {
    rep = check_finite_symmetry(sys, need(cs.phi, "phi"), need(cs.Phi, "Phi"),
                                seeded_box(sys.n, box, samples, seed), tol);
  } else if (kind == "domain") {
    rep = check_D_invariance(sys, need(cs.phi, "phi"),
                             seeded_box(sys.n, box, samples, seed), tol);
  } else if (kind == "infinitesimal") {
    const SmoothMap* B = cs.B ? &*cs.B : nullptr;
    rep = check_infinitesimal(sys, need(cs.V, "V"), B,
                              seeded_box(sys.n, box, samples, seed), tol);
  } else if (kind == "dual") {
    rep = check_dual_invariance(sys, need(cs.phi, "phi"), need(cs.Phi, "Phi"),
                                seeded_box(2 * sys.n, box, samples, seed), tol);
  } else if (kind == "dynamic") {
    if (x0_text.empty()) throw ShapeError("check 'dynamic' needs --x0");
    DynamicTestOptions dopts;
    dopts.t_end = t_end;
    dopts.step = step;
    dopts.eps = eps;
    dopts.tol = tol;
    bool infinitesimal = cs.V.has_value();
    const SmoothMap& cand = infinitesimal ? *cs.V : need(cs.phi, "phi or V");
    rep = dynamic_symmetry_test(sys, cand, infinitesimal, parse_vector(x0_text),
                                dopts);
  } else {
    throw ShapeError("unknown check kind: " + kind);
  }

  json out = {{"system", sys.name}, {"kind", kind}, {"report", rep}};
  emit(out.dump(2), common.output);
  return verdict_code(rep.verdict);
}

int run_lift(const CommonOpts& common, int samples, double box,
             std::uint64_t seed) {
  SingularSystem sys = read_system(common.system_path);
  LiftedSystem lifted = lift(sys);
  SingularSystem big = lifted.as_singular_system();

  double worst = 0.0;
  for (const Eigen::VectorXd& z : seeded_box(2 * sys.n, box, samples, seed))
    worst = std::max(worst, lifted.closedness_residual(z));

  std::ostringstream os;
  os << "# closedness residual over " << samples << " samples: " << worst << "\n"
     << system_to_text(big);
  std::string text = os.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  emit(text, common.output);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for linearly singular differential equations"};
  app.require_subcommand(1);

  CommonOpts c_analyze, c_integrate, c_check, c_lift;
  std::string x0_text, gauge_text, candidate_path, kind = "finite";
  int samples = 0, workers = 1;
  double box = 1.0, t_end = 1.0, step = 1e-2, eps = 0.1;
  std::uint64_t seed = 42;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "classify a point and optionally probe a sample box");
  add_common(analyze, c_analyze);
  analyze->add_option("--x0", x0_text, "base point, comma separated (default origin)");
  analyze->add_option("--samples", samples, "random probe points (0 = skip probe)");
  analyze->add_option("--box", box, "half width of the probe box");
  analyze->add_option("--seed", seed, "sampling seed");
  analyze->add_option("--workers", workers, "probe threads");

  CLI::App* integrate_cmd = app.add_subcommand(
      "integrate", "integrate from a point on the final constraint set");
  add_common(integrate_cmd, c_integrate);
  integrate_cmd->add_option("--x0", x0_text, "initial state, comma separated")
      ->required();
  integrate_cmd->add_option("--t-end", t_end, "integration time");
  integrate_cmd->add_option("--step", step, "step size");
  integrate_cmd->add_option("--gauge", gauge_text,
                            "fixed gauge coefficients, comma separated");

  CLI::App* check = app.add_subcommand(
      "check", "test a candidate symmetry against the system");
  add_common(check, c_check);
  check->add_option("--candidate", candidate_path, "candidate description file")
      ->required();
  check->add_option("--kind", kind,
                    "finite | domain | infinitesimal | dual | dynamic");
  check->add_option("--samples", samples, "sample count")->default_val(10);
  check->add_option("--box", box, "half width of the sample box");
  check->add_option("--seed", seed, "sampling seed");
  check->add_option("--x0", x0_text, "start point for the dynamic check");
  check->add_option("--eps", eps, "flow time for vector field candidates");
  check->add_option("--t-end", t_end, "trajectory length for the dynamic check");
  check->add_option("--step", step, "step size for the dynamic check");

  CLI::App* lift_cmd = app.add_subcommand(
      "lift", "emit the doubled-space Hamiltonian form of the system");
  add_common(lift_cmd, c_lift);
  lift_cmd->add_option("--samples", samples, "closedness spot check count")
      ->default_val(5);
  lift_cmd->add_option("--box", box, "half width of the spot check box");
  lift_cmd->add_option("--seed", seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (analyze->parsed())
      return run_analyze(c_analyze, x0_text, samples, box, seed, workers);
    if (integrate_cmd->parsed())
      return run_integrate(c_integrate, x0_text, t_end, step, gauge_text);
    if (check->parsed())
      return run_check(c_check, candidate_path, kind, samples, box, seed,
                       x0_text, eps, t_end, step);
    if (lift_cmd->parsed()) return run_lift(c_lift, samples, box, seed);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kBadInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const InconsistentPoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOffFinal;
  } catch (const NotOnFinal& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOffFinal;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad numeric argument: " << e.what() << "\n";
    return kBadInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kBadInput;
}
