#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopmitl/cli.hpp"
#include "coopmitl/trace_io.hpp"
#include "doctest.h"

using namespace coopmitl;

namespace {

const std::string kScenario = COOPMITL_SOURCE_DIR "/scenarios/paperV.toml";

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "coopmitl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("coopmitl-cli-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool contains(const std::string& text, const std::string& part) {
  return text.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("check prints the canonical form and the fragment verdict") {
  const auto ok = run({"check", "G[0,inf) !obs & F[0,50] (green & F[0,20] blue)"});
  CHECK(ok.code == 0);
  CHECK(contains(ok.out, "canonical: ((G[0,inf) (!obs)) & (F[0,50] (green & (F[0,20] blue))))"));
  CHECK(contains(ok.out, "planner fragment: yes"));

  const auto outside = run({"check", "F blue"});
  CHECK(outside.code == 1);
  CHECK(contains(outside.out, "planner fragment: no"));

  const auto reversed = run({"check", "p U[3,2] q"});
  CHECK(reversed.code == 2);
  CHECK(contains(reversed.err, "upper bound must exceed lower bound"));
  // Caret under offset 3.
  CHECK(contains(reversed.err, "\n     ^"));

  CHECK(run({"check", "--formula", "a & b"}).code == 0);
  CHECK(run({"check"}).code == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"plan"}).code == 2);
  CHECK(run({"plan", "--scenario", "/nonexistent/file.toml"}).code == 2);
  CHECK(run({"simulate", "--scenario", kScenario}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(contains(help.out, "simulate"));
}

TEST_CASE("plan writes a plan file or reports no accepting run") {
  const auto dir = scratch("plan");
  const auto r = run({"plan", "--scenario", kScenario, "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "10 steps"));
  const auto p = io::read_plan(dir / "plan.json");
  CHECK(p.steps.size() == 10);
  CHECK(p.steps.front().region == RegionId{1});

  const auto none = run({"plan", "--scenario", kScenario, "--formula", "F[0,10] green",
                         "--out-dir", dir.string()});
  CHECK(none.code == 1);
  CHECK(contains(none.err, "no accepting run"));

  const auto outside = run({"plan", "--scenario", kScenario, "--formula", "F green",
                            "--out-dir", dir.string()});
  CHECK(outside.code == 1);
  CHECK(contains(outside.err, "UnsupportedFragment"));

  const auto bad = run({"plan", "--scenario", kScenario, "--formula", "F[0,1", "--out-dir",
                        dir.string()});
  CHECK(bad.code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run plans, simulates and verifies a short task") {
  const auto dir = scratch("run");
  // Pure safety holds by staying in pi1: one 5 s self-loop.
  const auto r = run({"run", "--scenario", kScenario, "--formula", "G[0,inf) !obs",
                      "--out-dir", dir.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(std::filesystem::exists(dir / "plan.json"));
  CHECK(std::filesystem::exists(dir / "trace.csv"));
  REQUIRE(std::filesystem::exists(dir / "report.json"));
  std::ifstream in(dir / "report.json");
  const auto report = nlohmann::json::parse(in);
  CHECK(report.at("satisfied") == true);
  CHECK(report.at("violation_count") == 0);

  const std::string plan = (dir / "plan.json").string();
  const std::string trace = (dir / "trace.csv").string();
  const auto verify = run({"verify", "--scenario", kScenario, "--formula", "F[0,50] green",
                           "--plan", plan, "--trace", trace, "--out-dir", dir.string()});
  CHECK(verify.code == 1);
  CHECK(contains(verify.out, "NOT satisfied"));
  std::filesystem::remove_all(dir);
}
