// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <string>

#include "fgmfc/fgmfc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheck = 4;

int exit_code(fgmfc_status s) {
  switch (s) {
    case FGMFC_OK:
      return kExitOk;
    case FGMFC_CONFIG_ERROR:
    case FGMFC_INVALID_ARGUMENT:
    case FGMFC_IO_ERROR:
      return kExitConfig;
    case FGMFC_CHECK_FAILED:
      return kExitCheck;
    default:
      return kExitSolver;
  }
}

int report(fgmfc_status s, const char* stage) {
  std::cerr << "fgmfc " << stage << ": " << fgmfc_last_error() << "\n";
  return exit_code(s);
}

struct StringDeleter {
  void operator()(char* p) const { fgmfc_string_free(p); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ConfigDeleter {
  void operator()(fgmfc_config* p) const { fgmfc_config_free(p); }
};
using OwnedConfig = std::unique_ptr<fgmfc_config, ConfigDeleter>;

struct SolutionDeleter {
  void operator()(fgmfc_solution* p) const { fgmfc_solution_free(p); }
};

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

fgmfc_status load(const std::string& path, OwnedConfig& out) {
  fgmfc_config* raw = nullptr;
  const fgmfc_status s = fgmfc_config_load(path.c_str(), &raw);
  out.reset(raw);
  if (s == FGMFC_OK) {
    char* w = nullptr;
    if (fgmfc_config_warnings(raw, &w) == FGMFC_OK) {
      OwnedString warnings(w);
      if (*warnings) std::cerr << "warning: " << warnings.get();
    }
  }
  return s;
}

std::string output_dir(const fgmfc_config* cfg, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  char* d = nullptr;
  if (fgmfc_config_output_dir(cfg, &d) != FGMFC_OK) return "fgmfc_out";
  OwnedString owned(d);
  return owned.get();
}

int cmd_solve(const std::string& config, const std::string& out) {
  OwnedConfig cfg;
  if (auto s = load(config, cfg); s != FGMFC_OK) return report(s, "config");
  fgmfc_solution* raw = nullptr;
  if (auto s = fgmfc_solve(cfg.get(), &raw); s != FGMFC_OK) return report(s, "solve");
  std::unique_ptr<fgmfc_solution, SolutionDeleter> sol(raw);
  const std::string dir = output_dir(cfg.get(), out);
  if (auto s = fgmfc_solution_write(sol.get(), dir.c_str()); s != FGMFC_OK) return report(s, "write");
  char* rep = nullptr;
  if (auto s = fgmfc_solution_report_json(sol.get(), &rep); s != FGMFC_OK) return report(s, "report");
  OwnedString text(rep);
  const auto j = nlohmann::json::parse(text.get());
  std::cout << "picard_iterations " << j["picard_iterations"] << "\n"
            << "final_residual " << j["final_residual"] << "\n"
            << "min_density " << j["min_density"] << "\n"
            << "min_density_truncated " << j["min_density_truncated"] << "\n"
            << "cutoff_activations " << j["cutoff_activations"] << "\n"
            << "output " << dir << "\n";
  for (const auto& w : j["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& out) {
  OwnedConfig cfg;
  if (auto s = load(config, cfg); s != FGMFC_OK) return report(s, "config");
  const std::string dir = output_dir(cfg.get(), out);
  if (auto s = fgmfc_sweep(cfg.get(), dir.c_str()); s != FGMFC_OK) return report(s, "sweep");
  std::ifstream in(dir + "/errors.csv");
  std::cout << in.rdbuf();
  std::ifstream rep(dir + "/report.json");
  const auto j = nlohmann::json::parse(rep);
  for (const auto& [name, fit] : j["slopes"].items()) {
    std::cout << "slope " << name << " ";
    if (fit["slope"].is_null()) {
      std::cout << "n/a";
    } else {
      std::cout << shortest(fit["slope"].get<double>());
    }
    if (fit["at_floor"].get<bool>()) std::cout << " (round-off floor)";
    std::cout << "\n";
  }
  std::cout << "output " << dir << "\n";
  return kExitOk;
}

int cmd_check(const std::string& config, const std::string& out) {
  OwnedConfig cfg;
  if (auto s = load(config, cfg); s != FGMFC_OK) return report(s, "config");
  const std::string dir = output_dir(cfg.get(), out);
  char* text = nullptr;
  int passed = 0;
  if (auto s = fgmfc_check(cfg.get(), dir.c_str(), &text, &passed); s != FGMFC_OK) return report(s, "check");
  OwnedString owned(text);
  const auto j = nlohmann::json::parse(owned.get());
  for (const auto& c : j["checks"]) {
    const char* tag = c["skipped"].get<bool>() ? "SKIP" : (c["passed"].get<bool>() ? "PASS" : "FAIL");
    std::cout << tag << " " << c["name"].get<std::string>() << ": " << c["detail"].get<std::string>() << "\n";
  }
  for (const auto& r : j["positivity_scan"])
    std::cout << "scan N=" << r["N"] << " min_density=" << r["min_density"]
              << " min_density_truncated=" << r["min_density_truncated"] << "\n";
  std::cout << "output " << dir << "/checks.json\n";
  return passed ? kExitOk : kExitCheck;
}

int cmd_truncate(const std::string& field, int band, const std::string& out) {
  char* text = nullptr;
  if (auto s = fgmfc_truncate_csv(field.c_str(), band, &text); s != FGMFC_OK) return report(s, "truncate");
  OwnedString owned(text);
  if (out.empty()) {
    std::cout << owned.get();
    return kExitOk;
  }
  std::ofstream f(out, std::ios::binary);
  f << owned.get();
  if (!f) {
    std::cerr << "fgmfc truncate: cannot write '" << out << "'\n";
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_value(const std::string& config, int t_index) {
  OwnedConfig cfg;
  if (auto s = load(config, cfg); s != FGMFC_OK) return report(s, "config");
  double v = 0.0;
  if (auto s = fgmfc_value(cfg.get(), t_index, &v); s != FGMFC_OK) return report(s, "value");
  std::cout << shortest(v) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-Galerkin solver for mean field optimal control on the torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fgmfc_version()));

  std::string config, out, field;
  int band = 0, t_index = 0;

  auto* solve = app.add_subcommand("solve", "solve the truncated forward-backward system");
  solve->add_option("config", config, "JSON configuration")->required();
  solve->add_option("--out", out, "output directory (default: output_dir of the config)");

  auto* sweep = app.add_subcommand("sweep", "convergence sweep against the reference band");
  sweep->add_option("config", config, "JSON configuration")->required();
  sweep->add_option("--out", out, "output directory (default: output_dir of the config)");

  auto* check = app.add_subcommand("check", "run the property suite");
  check->add_option("config", config, "JSON configuration")->required();
  check->add_option("--out", out, "output directory (default: output_dir of the config)");

  auto* truncate = app.add_subcommand("truncate", "Dirichlet truncation of a coefficient CSV");
  truncate->add_option("field", field, "field CSV (k1,...,kd,re,im)")->required();
  truncate->add_option("--band", band, "truncation band N")->required();
  truncate->add_option("--out", out, "output CSV (default: stdout)");

  auto* value = app.add_subcommand("value", "value function V^N(t, m)");
  value->add_option("config", config, "JSON configuration")->required();
  value->add_option("--t", t_index, "time node index")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*solve) return cmd_solve(config, out);
  if (*sweep) return cmd_sweep(config, out);
  if (*check) return cmd_check(config, out);
  if (*truncate) return cmd_truncate(field, band, out);
  return cmd_value(config, t_index);
}
