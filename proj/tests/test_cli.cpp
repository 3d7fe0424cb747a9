#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hardygeo/cli.hpp"

using namespace hardygeo;
namespace fs = std::filesystem;

static std::string fresh_dir(const char* tag) {
  fs::path p = fs::temp_directory_path() / (std::string("hgcli-") + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

static std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("successful run writes a report and timings") {
  RunConfig cfg;
  cfg.command = "poincare";
  cfg.scenario = "interval";
  cfg.n = 64;
  cfg.quiet = true;
  cfg.out = fresh_dir("ok");
  CHECK(run(cfg) == 0);
  REQUIRE(fs::exists(cfg.out + "/report.json"));
  REQUIRE(fs::exists(cfg.out + "/timings.csv"));
  nlohmann::json rep = nlohmann::json::parse(slurp(cfg.out + "/report.json"));
  CHECK(rep["pass"] == true);
  CHECK(rep["command"] == "poincare");
  CHECK(rep["result"]["constant"].get<double>() > 0.3);
  CHECK(rep["result"]["constant"].get<double>() < 0.5);
}

TEST_CASE("reports are byte-identical across runs") {
  RunConfig cfg;
  cfg.command = "build-bullet";
  cfg.scenario = "annulus-mixed";
  cfg.quiet = true;
  cfg.out = fresh_dir("rep1");
  CHECK(run(cfg) == 0);
  std::string first = slurp(cfg.out + "/report.json");
  cfg.out = fresh_dir("rep2");
  CHECK(run(cfg) == 0);
  CHECK(slurp(cfg.out + "/report.json") == first);
}

TEST_CASE("list-scenarios enumerates the built-ins") {
  RunConfig cfg;
  cfg.command = "list-scenarios";
  cfg.quiet = true;
  cfg.out = fresh_dir("ls");
  CHECK(run(cfg) == 0);
  nlohmann::json rep = nlohmann::json::parse(slurp(cfg.out + "/report.json"));
  CHECK(rep["result"]["scenarios"].size() == 6);
}

TEST_CASE("hypothesis failure exits 1 and is recorded") {
  RunConfig cfg;
  cfg.command = "porosity";
  cfg.scenario = "square-edge";
  cfg.n = 16;
  cfg.kappa = 0.99;  // no boundary is that porous
  cfg.quiet = true;
  cfg.out = fresh_dir("hyp");
  CHECK(run(cfg) == 1);
  nlohmann::json rep = nlohmann::json::parse(slurp(cfg.out + "/report.json"));
  CHECK(rep["pass"] == false);
}

TEST_CASE("configuration errors exit 3") {
  RunConfig cfg;
  cfg.quiet = true;

  cfg.command = "frobnicate";
  cfg.scenario = "interval";
  CHECK(run(cfg) == 3);

  cfg.command = "hardy";
  cfg.scenario = "no-such-scenario.json";
  CHECK(run(cfg) == 3);

  cfg.scenario = "interval";
  cfg.n = 32;
  cfg.p = 0.5;
  cfg.out = fresh_dir("bad");
  CHECK(run(cfg) == 3);
  nlohmann::json rep = nlohmann::json::parse(slurp(cfg.out + "/report.json"));
  CHECK(rep["pass"] == false);
  CHECK(rep["error"]["kind"] == "Config");
}
