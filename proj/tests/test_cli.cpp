#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "cuspsheet/cli/commands.hpp"
#include "cuspsheet/cli/output.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kScenarios = CUSPSHEET_SCENARIOS;
const fs::path kWork = fs::current_path() / "cli_work";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int code;
  std::string err;
};

Result run(const std::string& args) {
  fs::create_directories(kWork);
  const fs::path errFile = kWork / "stderr.txt";
  const std::string cmd = std::string(CUSPSHEET_CLI) + " " + args + " 2> " + errFile.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(errFile)};
}

fs::path write_scenario(const std::string& name, const std::string& body) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p) << body;
  return p;
}

std::string out_dir(const std::string& name) {
  const fs::path d = kWork / name;
  fs::remove_all(d);
  return d.string();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("sha256 known answer") {
  CHECK(cuspsheet::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(cuspsheet::cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("number formatting") {
  using cuspsheet::cli::fmt;
  CHECK(fmt(0.1) == "0.10000000000000001");
  CHECK(fmt(1.0) == "1");
  CHECK(fmt(std::nan("")) == "nan");
  CHECK(fmt(-INFINITY) == "-inf");
}

TEST_CASE("bad input exits with 2") {
  const auto bad = write_scenario("bad.json", "{\"name\": \"x\", \"grid\": ");
  auto r = run("simulate --scenario " + bad.string() + " --out " + out_dir("bad"));
  CHECK(r.code == 2);
  CHECK(r.err.find("parse") != std::string::npos);

  const auto unknown = write_scenario(
      "unknown.json", R"({"name": "x", "colour": 1, "grid": {"t_min": 0, "t_max": 0.1, "s_min": 0, "s_max": 0.1, "step": 0.05}})");
  r = run("simulate --scenario " + unknown.string() + " --out " + out_dir("unknown"));
  CHECK(r.code == 2);
  CHECK(r.err.find("colour") != std::string::npos);

  const auto negative = write_scenario(
      "negative.json", R"({"name": "x", "grid": {"t_min": 0, "t_max": 0.1, "s_min": 0, "s_max": 0.1, "step": -0.05}})");
  CHECK(run("simulate --scenario " + negative.string() + " --out " + out_dir("negative")).code == 2);

  const auto notSu2 = write_scenario(
      "notsu2.json",
      R"({"name": "x", "initial_plus": [[[2,0],[0,0]],[[0,0],[1,0]]], "grid": {"t_min": 0, "t_max": 0.1, "s_min": 0, "s_max": 0.1, "step": 0.05}})");
  CHECK(run("simulate --scenario " + notSu2.string() + " --out " + out_dir("notsu2")).code == 2);

  CHECK(run("simulate --scenario " + (kWork / "missing.json").string()).code == 2);
  CHECK(run("simulate").code == 2);
  CHECK(run("frobnicate --scenario x").code == 2);
}

TEST_CASE("static string files") {
  const auto dir = out_dir("static");
  REQUIRE(run("simulate --scenario " + (kScenarios / "static.json").string() + " --out " + dir).code == 0);
  for (const char* f : {"worldsheet.csv", "metric.csv", "metadata.json", "manifest.json"}) CHECK(fs::exists(fs::path(dir) / f));
  std::istringstream ws(slurp(fs::path(dir) / "worldsheet.csv"));
  std::string line;
  std::getline(ws, line);
  CHECK(line == "t,s,X0,X1,X2,X3,metric");
  std::size_t rows = 0;
  while (std::getline(ws, line)) {
    double v[7];
    char comma;
    std::istringstream row(line);
    row >> v[0];
    for (int k = 1; k < 7; ++k) row >> comma >> v[k];
    CHECK(v[2] == v[0]);
    CHECK(v[3] == 0.0);
    CHECK(v[4] == 0.0);
    CHECK(std::abs(v[5] + v[1]) < 1e-14);
    CHECK(v[6] == -0.5);
    ++rows;
  }
  CHECK(rows > 0);
  const auto manifest = read_json(fs::path(dir) / "manifest.json");
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["scenario_sha256"] == cuspsheet::cli::sha256_hex(slurp(kScenarios / "static.json")));
  CHECK(manifest["files"]["worldsheet.csv"] == cuspsheet::cli::sha256_hex(slurp(fs::path(dir) / "worldsheet.csv")));
  CHECK(manifest.contains("residual_summary"));
  CHECK(manifest["grid"]["step"] == 0.05);
}

TEST_CASE("identical scenarios give byte-identical outputs") {
  const auto a = out_dir("det_a");
  const auto b = out_dir("det_b");
  const auto sc = (kScenarios / "smooth.json").string();
  REQUIRE(run("all --scenario " + sc + " --out " + a).code == 0);
  REQUIRE(run("all --scenario " + sc + " --out " + b + " --threads 3").code == 0);
  for (const char* f : {"worldsheet.csv", "metric.csv", "fields.csv", "cusps.json", "verify.json"}) {
    CHECK_MESSAGE(slurp(fs::path(a) / f) == slurp(fs::path(b) / f), f);
  }
}

TEST_CASE("stable cusp report") {
  const auto dir = out_dir("stable");
  REQUIRE(run("cusps --scenario " + (kScenarios / "stable_cusp.json").string() + " --out " + dir).code == 0);
  const auto doc = read_json(fs::path(dir) / "cusps.json");
  std::size_t diamonds = 0;
  for (const auto& e : doc["events"]) {
    if (e["kind"] != "stableDiamond") continue;
    ++diamonds;
    CHECK(std::abs(e["diamond"]["duration"].get<double>() - 2.0) <= 0.01);
    CHECK(e["segment"]["passed"] == true);
    CHECK(std::abs(e["speed"].get<double>() - 1.0) <= 0.05);
  }
  CHECK(diamonds == 1);
}

TEST_CASE("no-cusp scenario gives an empty list") {
  const auto dir = out_dir("nomatch");
  REQUIRE(run("cusps --scenario " + (kScenarios / "no_match.json").string() + " --out " + dir).code == 0);
  const auto doc = read_json(fs::path(dir) / "cusps.json");
  CHECK(doc["events"].is_array());
  CHECK(doc["events"].empty());
}

TEST_CASE("verify passes on the smooth scenario and residuals scale with h^2") {
  const auto fine = out_dir("verify_fine");
  const auto coarse = out_dir("verify_coarse");
  const auto sc = (kScenarios / "smooth.json").string();
  REQUIRE(run("verify --scenario " + sc + " --out " + fine).code == 0);
  REQUIRE(run("verify --scenario " + sc + " --out " + coarse + " --step 0.02").code == 0);
  const auto a = read_json(fs::path(fine) / "verify.json");
  const auto b = read_json(fs::path(coarse) / "verify.json");
  CHECK(a["passed"] == true);
  CHECK(b["passed"] == true);
  const auto value = [](const json& doc, const std::string& name) {
    for (const auto& c : doc["checks"])
      if (c["name"] == name) return c["value"].get<double>();
    return std::nan("");
  };
  for (const char* name : {"pde_liouville", "pde_alpha_minus", "null_constraint_plus"}) {
    const double ratio = value(b, name) / value(a, name);
    CHECK_MESSAGE(ratio > 3.0, name);
    CHECK_MESSAGE(ratio < 5.0, name);
  }
  CHECK(fs::exists(fs::path(fine) / "fields.csv"));
}

TEST_CASE("broken integrator hook fails unitarity") {
  const std::string body = slurp(kScenarios / "smooth.json");
  auto doc = json::parse(body);
  doc["test_hooks"] = {{"euler_transport", true}};
  const auto sc = write_scenario("euler.json", doc.dump());
  const auto dir = out_dir("euler");
  CHECK(run("verify --scenario " + sc.string() + " --out " + dir).code == 1);
  const auto v = read_json(fs::path(dir) / "verify.json");
  CHECK(v["passed"] == false);
  for (const auto& c : v["checks"])
    if (c["name"] == "su2_unitarity") CHECK(c["status"] == "FAIL");
}

TEST_CASE("kernel rows beyond the cutoff are zero") {
  const auto dir = out_dir("kernel");
  REQUIRE(run("kernel --scenario " + (kScenarios / "kernel_straight.json").string() + " --out " + dir).code == 0);
  std::istringstream in(slurp(fs::path(dir) / "kernel.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "px,py,pz,ppx,ppy,ppz,re,im");
  std::size_t zeros = 0, rows = 0;
  while (std::getline(in, line)) {
    double v[8];
    char comma;
    std::istringstream row(line);
    row >> v[0];
    for (int k = 1; k < 8; ++k) row >> comma >> v[k];
    if (v[2] == 12.0) {
      CHECK(v[6] == 0.0);
      CHECK(v[7] == 0.0);
      ++zeros;
    }
    // straight string, q along z: eps 2 sin(k R) / k
    if (v[0] == 0 && v[1] == 0 && v[3] == 0 && v[4] == 0 && v[2] != 12.0) {
      const double k = v[2] - v[5];
      const double want = k == 0.0 ? -4.0 : -2 * std::sin(2 * k) / k;
      CHECK(std::abs(v[6] - want) <= 1e-3);
    }
    ++rows;
  }
  CHECK(rows == 12);
  CHECK(zeros == 3);
}

TEST_CASE("library entry point reports bad input without throwing") {
  std::ostringstream log;
  cuspsheet::cli::RunOptions o;
  o.scenario = kWork / "does_not_exist.json";
  CHECK(cuspsheet::cli::run_command(cuspsheet::cli::Command::simulate, o, log) == 2);
  CHECK(!log.str().empty());
}
