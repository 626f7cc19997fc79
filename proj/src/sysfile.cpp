#include "linsing/sysfile.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "linsing/errors.hpp"
#include "linsing/numeric.hpp"

namespace linsing {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KeyValue {
  std::string value;
  int line = 0;
};

std::map<std::string, KeyValue> read_pairs(const std::string& text) {
  std::map<std::string, KeyValue> pairs;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key = value", lineno, 1);
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", lineno, 1);
    if (pairs.count(key))
      throw ParseError("duplicate key '" + key + "'", lineno, 1);
    pairs[key] = {value, lineno};
  }
  return pairs;
}

int parse_positive_int(const KeyValue& kv, const std::string& key) {
  try {
    std::size_t used = 0;
    int v = std::stoi(kv.value, &used);
    if (used != kv.value.size() || v <= 0) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("key '" + key + "' needs a positive integer", kv.line, 1);
  }
}

SmoothMap parse_map_value(const KeyValue& kv, const std::string& key,
                          int arity, int rows, int cols, bool with_eps) {
  SmoothMap map;
  try {
    map = with_eps ? SmoothMap::parse_with_eps(kv.value, arity)
                   : SmoothMap::parse(kv.value, arity);
  } catch (const ParseError& e) {
    // keep the column inside the value text, point the line at the file
    throw ParseError(std::string("key '") + key + "': " + e.reason(), kv.line,
                     e.column());
  }
  if (map.rows() != rows || map.cols() != cols)
    throw ParseError("key '" + key + "' must be " + std::to_string(rows) +
                         " by " + std::to_string(cols),
                     kv.line, 1);
  return map;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

SingularSystem parse_system_text(const std::string& text) {
  auto pairs = read_pairs(text);
  for (const auto& [key, kv] : pairs)
    if (key != "n" && key != "m" && key != "A" && key != "b" &&
        key != "name" && key != "labels")
      throw ParseError("unknown key '" + key + "'", kv.line, 1);
  for (const char* req : {"n", "m", "A", "b"})
    if (!pairs.count(req))
      throw ParseError(std::string("missing key '") + req + "'", 1, 1);

  SingularSystem sys;
  sys.n = parse_positive_int(pairs["n"], "n");
  sys.m = parse_positive_int(pairs["m"], "m");
  sys.A = parse_map_value(pairs["A"], "A", sys.n, sys.m, sys.n, false);
  sys.b = parse_map_value(pairs["b"], "b", sys.n, sys.m, 1, false);
  if (pairs.count("name")) sys.name = pairs["name"].value;
  if (pairs.count("labels")) {
    sys.labels = split_list(pairs["labels"].value);
    if (static_cast<int>(sys.labels.size()) != sys.n)
      throw ParseError("labels must list one name per state variable",
                       pairs["labels"].line, 1);
  }
  sys.validate();
  return sys;
}

SingularSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_system_text(buf.str());
}

std::string system_to_text(const SingularSystem& sys) {
  if (!sys.A.printable() || !sys.b.printable())
    throw Error("system is not expression-backed");
  std::ostringstream out;
  if (!sys.name.empty()) out << "name = " << sys.name << "\n";
  out << "n = " << sys.n << "\n";
  out << "m = " << sys.m << "\n";
  out << "A = " << sys.A.str() << "\n";
  out << "b = " << sys.b.str() << "\n";
  if (!sys.labels.empty()) {
    out << "labels = ";
    for (std::size_t i = 0; i < sys.labels.size(); ++i)
      out << (i ? ", " : "") << sys.labels[i];
    out << "\n";
  }
  return out.str();
}

void save_system(const std::string& path, const SingularSystem& sys) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << system_to_text(sys);
}

CandidateSet parse_candidates_text(const std::string& text, int n, int m) {
  auto pairs = read_pairs(text);
  for (const auto& [key, kv] : pairs)
    if (key != "phi" && key != "phi_inv" && key != "Phi" && key != "V" &&
        key != "B" && key != "h")
      throw ParseError("unknown key '" + key + "'", kv.line, 1);

  CandidateSet c;
  if (pairs.count("phi"))
    c.phi = parse_map_value(pairs["phi"], "phi", n, n, 1, false);
  if (pairs.count("phi_inv"))
    c.phi_inv = parse_map_value(pairs["phi_inv"], "phi_inv", n, n, 1, false);
  if (pairs.count("Phi"))
    c.Phi = parse_map_value(pairs["Phi"], "Phi", n, m, m, false);
  if (pairs.count("V")) c.V = parse_map_value(pairs["V"], "V", n, n, 1, false);
  if (pairs.count("B")) c.B = parse_map_value(pairs["B"], "B", n, m, m, false);
  if (pairs.count("h")) c.h = parse_map_value(pairs["h"], "h", n, n, 1, true);

  if (c.phi.has_value() != c.phi_inv.has_value())
    throw ParseError("phi and phi_inv must be given together",
                     pairs.count("phi") ? pairs["phi"].line
                                        : pairs["phi_inv"].line,
                     1);
  if (c.phi) check_inverse_pair(*c.phi, *c.phi_inv);
  return c;
}

CandidateSet load_candidates(const std::string& path, int n, int m) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_candidates_text(buf.str(), n, m);
}

void check_inverse_pair(const SmoothMap& phi, const SmoothMap& phi_inv,
                        int samples, double tol) {
  int n = phi.arity();
  SampleStream rng(12345);
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -1.0);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, 1.0);
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd x = rng.box_point(lo, hi);
    Eigen::VectorXd back = phi_inv.eval_vector(phi.eval_vector(x));
    if ((back - x).norm() > tol * std::max(1.0, x.norm()))
      throw NumericError("phi_inv does not invert phi at a sample point");
  }
}

}  // namespace linsing
