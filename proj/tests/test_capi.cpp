// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "fgmfc/fgmfc.h"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::path(FGMFC_TEST_DIR) / "capi_work";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FGMFC_CLI_PATH) + " " + args + " > " + (kDir / "stdout.txt").string() +
                          " 2> " + (kDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmall = R"({"band": 4, "steps": 64, "sweep": [2, 4], "reference_band": 16, "class_samples": 1})";

}  // namespace

TEST_CASE("C API round trip") {
  fgmfc_config* cfg = nullptr;
  REQUIRE(fgmfc_config_parse(kSmall, &cfg) == FGMFC_OK);
  char* text = nullptr;
  REQUIRE(fgmfc_config_json(cfg, &text) == FGMFC_OK);
  CHECK(std::string(text).find("\"band\": 4") != std::string::npos);
  fgmfc_string_free(text);

  fgmfc_solution* sol = nullptr;
  REQUIRE(fgmfc_solve(cfg, &sol) == FGMFC_OK);
  const int zero[1] = {0};
  const int one[1] = {1};
  double re = 0.0, im = 0.0;
  CHECK(fgmfc_solution_forward_coeff(sol, 64, zero, &re, &im) == FGMFC_OK);
  CHECK(std::abs(re - 1.0) <= 1e-10);
  CHECK(fgmfc_solution_forward_coeff(sol, 0, one, &re, &im) == FGMFC_OK);
  CHECK(re == 0.25);
  CHECK(fgmfc_solution_backward_coeff(sol, 65, one, &re, &im) == FGMFC_INVALID_ARGUMENT);
  CHECK(std::string(fgmfc_last_error()).find("out of range") != std::string::npos);
  REQUIRE(fgmfc_solution_report_json(sol, &text) == FGMFC_OK);
  CHECK(std::string(text).find("picard_iterations") != std::string::npos);
  CHECK(std::string(text).find("wall") == std::string::npos);
  fgmfc_string_free(text);
  fgmfc_solution_free(sol);

  double v = 0.0;
  CHECK(fgmfc_value(cfg, 0, &v) == FGMFC_OK);
  CHECK(v > 0.0);
  fgmfc_config_free(cfg);

  CHECK(fgmfc_config_parse("{\"nope\": 1}", &cfg) == FGMFC_CONFIG_ERROR);
  CHECK(std::string(fgmfc_last_error()).find("nope") != std::string::npos);
  CHECK(fgmfc_solve(nullptr, &sol) == FGMFC_INVALID_ARGUMENT);
}

TEST_CASE("CLI solve is deterministic") {
  fs::remove_all(kDir);
  fs::create_directories(kDir);
  write(kDir / "small.json", kSmall);
  REQUIRE(run_cli("solve " + (kDir / "small.json").string() + " --out " + (kDir / "a").string()) == 0);
  REQUIRE(run_cli("solve " + (kDir / "small.json").string() + " --out " + (kDir / "b").string()) == 0);
  for (const char* f : {"config.json", "report.json", "forward/manifest.json", "forward/node_0064.csv",
                        "backward/node_0000.csv"}) {
    INFO(f);
    CHECK(fs::exists(kDir / "a" / f));
    CHECK(slurp(kDir / "a" / f) == slurp(kDir / "b" / f));
  }
  // The written config reproduces the run.
  REQUIRE(run_cli("solve " + (kDir / "a" / "config.json").string() + " --out " + (kDir / "c").string()) == 0);
  CHECK(slurp(kDir / "a" / "forward/node_0032.csv") == slurp(kDir / "c" / "forward/node_0032.csv"));
}

TEST_CASE("CLI sweep, value and truncate") {
  fs::create_directories(kDir);
  write(kDir / "small.json", kSmall);
  REQUIRE(run_cli("sweep " + (kDir / "small.json").string() + " --out " + (kDir / "sweep").string()) == 0);
  CHECK(slurp(kDir / "sweep" / "errors.csv").rfind("N,mu_l2,", 0) == 0);
  CHECK(fs::exists(kDir / "sweep" / "class_value.csv"));
  CHECK(fs::exists(kDir / "sweep" / "report.json"));

  REQUIRE(run_cli("value " + (kDir / "small.json").string() + " --t 0") == 0);
  CHECK(std::strtod(slurp(kDir / "stdout.txt").c_str(), nullptr) > 0.0);

  write(kDir / "field.csv", "k1,re,im\n-3,0.5,0\n0,1,0\n3,0.5,0\n");
  REQUIRE(run_cli("truncate " + (kDir / "field.csv").string() + " --band 2") == 0);
  CHECK(slurp(kDir / "stdout.txt") == "k1,re,im\n-2,0,0\n-1,0,0\n0,1,0\n1,0,0\n2,0,0\n");
  REQUIRE(run_cli("truncate " + (kDir / "field.csv").string() + " --band 3 --out " +
                  (kDir / "t.csv").string()) == 0);
  CHECK(slurp(kDir / "t.csv").find("3,0.5,0\n") != std::string::npos);
}

TEST_CASE("CLI exit codes") {
  fs::create_directories(kDir);
  write(kDir / "bad.json", "{\"band\": -1}");
  CHECK(run_cli("solve " + (kDir / "bad.json").string()) == 2);
  CHECK(run_cli("solve " + (kDir / "missing.json").string()) == 2);
  CHECK(run_cli("truncate " + (kDir / "missing.csv").string() + " --band 2") == 2);
  CHECK(run_cli("frobnicate") == 2);

  write(kDir / "stiff.json", R"({"band": 4, "steps": 64, "picard": {"max_iter": 1, "tol": 1e-30}})");
  CHECK(run_cli("solve " + (kDir / "stiff.json").string() + " --out " + (kDir / "stiff").string()) == 3);

  write(kDir / "concave.json", R"({"band": 2, "steps": 32,
    "running_cost": {"type": "cylindrical", "phi": "neg_quadratic", "psis": [{"mode": [1]}]},
    "terminal_cost": {"type": "zero"}})");
  CHECK(run_cli("check " + (kDir / "concave.json").string() + " --out " + (kDir / "concave").string()) == 4);
  CHECK(slurp(kDir / "stdout.txt").find("FAIL cost_monotonicity") != std::string::npos);
  CHECK(fs::exists(kDir / "concave" / "checks.json"));
}
