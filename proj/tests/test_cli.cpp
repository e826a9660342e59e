#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "fockflow/cli.hpp"

using namespace fockflow;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fockflow_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("parse and oracle") {
  auto r = run({"parse", "--poly", "y^2 + x^2 - 25"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("y^2 + x^2 - 25") != std::string::npos);
  r = run({"oracle", "--poly", "x^2 + y^2 - 25", "--bound", "6"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("4 solution(s)") != std::string::npos);
  CHECK(r.out.find("(3,4)") != std::string::npos);
  r = run({"oracle", "--poly", "2*x - 1", "--bound", "10"});
  CHECK(r.code == exit_no_solution);
}

TEST_CASE("usage and input errors") {
  CHECK(run({}).code == exit_usage);
  CHECK(run({"frobnicate"}).code == exit_usage);
  CHECK(run({"parse"}).code == exit_usage);
  CHECK(run({"parse", "--poly", "x", "--bogus"}).code == exit_usage);
  CHECK(run({"parse", "--poly", "2x"}).code == exit_data);
  CHECK(run({"spectrum", "--poly", "x - 3", "--alphas", "1,2", "--out", scratch("bad").string()}).code == exit_data);
  CHECK(run({"parse", "--config", "/nonexistent/file.cfg"}).code == exit_data);
  CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("numeric failures map to their own code") {
  const auto dir = scratch("flow_fail");
  // Exchange-symmetric displacements cross exactly; without reseeding the flow aborts.
  const auto r = run({"flow", "--poly", "x + y - 3", "--alphas", "1,1", "--cutoff", "6", "--levels", "6", "--out",
                      dir.string()});
  CHECK(r.code == exit_numeric);
}

TEST_CASE("spectrum and gap artifacts are deterministic") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    CHECK(run({"spectrum", "--poly", "x - 3", "--grid", "0.1,0.5,0.9", "--levels", "3", "--out", dir.string()}).code ==
          exit_ok);
    CHECK(run({"gap", "--poly", "x - 3", "--grid", "9", "--out", dir.string()}).code == exit_ok);
  }
  CHECK(slurp(a / "spectrum.csv") == slurp(b / "spectrum.csv"));
  CHECK(slurp(a / "gap.csv") == slurp(b / "gap.csv"));
  const std::string text = slurp(a / "spectrum.csv");
  CHECK(text.find("# command = spectrum") == 0);
  CHECK(text.find("\ns,E_0,E_1,E_2,gap_0\n") != std::string::npos);
  CHECK(text.find("\n0.10000000000000001,") != std::string::npos);
}

TEST_CASE("flow and sweep artifacts") {
  const auto dir = scratch("flow");
  auto r = run({"flow", "--poly", "x - 3", "--levels", "4", "--grid", "0.25,0.5", "--out", dir.string()});
  CHECK(r.code == exit_ok);
  const std::string flow = slurp(dir / "flow.csv");
  CHECK(flow.find("s,E_0,E_1,E_2,E_3,norm_drift,min_gap\n") != std::string::npos);
  r = run({"evolve", "--poly", "x - 3", "--time", "2,4", "--out", dir.string()});
  CHECK(r.code == exit_ok);
  const std::string sweep = slurp(dir / "sweep.csv");
  CHECK(sweep.find("T,probability,norm_drift,slices\n2,") != std::string::npos);
}

TEST_CASE("config file drives a run and flags override it") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "[problem]\npolynomial = 2*x - 1\ncutoff = 8\n[output]\ndirectory = " << dir.string() << "\n";
  }
  auto r = run({"decide", "--config", (dir / "run.cfg").string(), "--levels", "4"});
  CHECK(r.code == exit_no_solution);
  const std::string report = slurp(dir / "decision.txt");
  CHECK(report.find("# polynomial = 2*x - 1") != std::string::npos);
  CHECK(report.find("# levels = 4") != std::string::npos);
  CHECK(report.find("verdict = no_solution_in_window") != std::string::npos);
}

TEST_CASE("decide exit codes through the installed binary") {
  const auto dir = scratch("binary");
  const std::string cmd = std::string(FOCKFLOW_CLI_PATH) + " decide --poly 'x - 3' --levels 4 --out " + dir.string() +
                          " > " + (dir.string() + ".log") + " 2>&1";
  fs::create_directories(dir);
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == exit_ok);
  CHECK(slurp(dir.string() + ".log").find("solution_found (3)") != std::string::npos);
}
