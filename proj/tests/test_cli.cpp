#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

// stdout capture plus exit code for one invocation of the command line tool
int run_cli(const std::string& args, std::string* out = nullptr) {
  std::string cmd = std::string(LINSING_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string text;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    text.append(buf.data(), got);
  int status = pclose(pipe);
  if (out) *out = text;
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& content) : path(name) {
    std::ofstream os(path);
    os << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kRotation =
    "name = rotation\n"
    "n = 3\n"
    "m = 3\n"
    "A = 0, 1, 0; -1, 0, 0; 0, 0, 0\n"
    "b = x1; x2; 0*x3\n";

}  // namespace

TEST_CASE("analyze reports the chain and exits clean") {
  TempFile sys("cli_rot.txt", kRotation);
  std::string out;
  int code = run_cli("analyze cli_rot.txt --samples 6", &out);
  CHECK(code == 0);
  nlohmann::json j = nlohmann::json::parse(out);
  CHECK(j["system"] == "rotation");
  CHECK(j["chain"]["status"] == "stabilized");
  CHECK(j["chain"]["dims"] == std::vector<int>{3, 3});
  CHECK(j["probe"]["flagged"] == false);
}

TEST_CASE("analyze output is byte-identical across reruns and worker counts") {
  TempFile sys("cli_rot2.txt", kRotation);
  std::string a, b, c;
  CHECK(run_cli("analyze cli_rot2.txt --samples 12 --workers 1", &a) == 0);
  CHECK(run_cli("analyze cli_rot2.txt --samples 12 --workers 4", &b) == 0);
  CHECK(run_cli("analyze cli_rot2.txt --samples 12 --workers 3", &c) == 0);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("integrate walks the circle and writes a trajectory file") {
  TempFile sys("cli_rot3.txt", kRotation);
  std::string out;
  int code = run_cli(
      "integrate cli_rot3.txt --x0 1,0,0 --t-end 1.5707963267948966 "
      "--step 0.005 --output cli_traj.csv",
      &out);
  CHECK(code == 0);
  nlohmann::json j = nlohmann::json::parse(out);
  CHECK(j["gauge_dim"] == 1);
  double x1 = j["final_state"][0], x2 = j["final_state"][1];
  CHECK(x1 == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::abs(x2 - 1.0) < 1e-8);
  CHECK(double(j["max_defect"]) < 1e-6);

  std::ifstream csv("cli_traj.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,x1,x2,x3,defect,proj_residual");
  std::remove("cli_traj.csv");
}

TEST_CASE("check passes the true generator and fails a wrong one") {
  TempFile sys("cli_rot4.txt", kRotation);
  TempFile good("cli_cand_good.txt",
                "V = -x2; x1; 0*x3\nB = 0, -1, 0; 1, 0, 0; 0, 0, 0\n");
  TempFile bad("cli_cand_bad.txt", "V = 1 + 0*x1; 0*x2; 0*x3\n");

  std::string out;
  CHECK(run_cli("check cli_rot4.txt --candidate cli_cand_good.txt "
                "--kind infinitesimal --samples 6",
                &out) == 0);
  nlohmann::json j = nlohmann::json::parse(out);
  CHECK(j["report"]["verdict"] == "pass");

  CHECK(run_cli("check cli_rot4.txt --candidate cli_cand_bad.txt "
                "--kind infinitesimal --samples 6") == 1);
}

TEST_CASE("lift emits a loadable doubled system") {
  TempFile sys("cli_rot5.txt", kRotation);
  std::string out;
  CHECK(run_cli("lift cli_rot5.txt", &out) == 0);
  CHECK(out.find("# closedness residual") != std::string::npos);
  CHECK(out.find("n = 6") != std::string::npos);
  CHECK(out.find("labels = x1, x2, x3, p1, p2, p3") != std::string::npos);

  TempFile lifted("cli_lifted.txt", out);
  CHECK(run_cli("analyze cli_lifted.txt") == 0);
}

TEST_CASE("exit codes distinguish the failure modes") {
  TempFile broken("cli_broken.txt", "n = 1\nm = 1\nA = 1\nb = x1 +\n");
  CHECK(run_cli("analyze cli_broken.txt") == 2);
  CHECK(run_cli("analyze cli_nosuch.txt") == 2);
  CHECK(run_cli("frobnicate") == 2);

  TempFile cascade("cli_cascade.txt",
                   "name = cascade\nn = 2\nm = 2\nA = 1, 0; 0, 0\nb = x2; x1\n");
  CHECK(run_cli("integrate cli_cascade.txt --x0 0.3,0.7") == 4);

  TempFile drop("cli_drop.txt",
                "name = drop\nn = 2\nm = 2\nA = x1, 0; 0, 1\nb = 0*x1; 0*x2\n");
  CHECK(run_cli("analyze cli_drop.txt --samples 6") == 3);

  TempFile marginal("cli_marginal.txt",
                    "name = nudged\nn = 3\nm = 3\n"
                    "A = 0, 1, 0; -1, 0, 0; 0, 0, 0\n"
                    "b = x1; x2; 0*x3 + 3e-7\n");
  CHECK(run_cli("analyze cli_marginal.txt") == 5);
}
