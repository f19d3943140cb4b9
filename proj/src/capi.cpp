// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fgmfc/fgmfc.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "fgmfc/control.hpp"
#include "fgmfc/harness.hpp"
#include "fgmfc/io.hpp"

struct fgmfc_config {
  fgmfc::ExperimentConfig ec;
};

struct fgmfc_solution {
  fgmfc::ExperimentConfig ec;
  fgmfc::FBSolution sol;
};

namespace {

thread_local std::string g_last_error;

fgmfc_status to_status(fgmfc::ErrorCode code) { return static_cast<fgmfc_status>(code); }

template <class Body>
fgmfc_status guarded(Body&& body) {
  try {
    body();
    g_last_error.clear();
    return FGMFC_OK;
  } catch (const fgmfc::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FGMFC_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FGMFC_INTERNAL_ERROR;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool cond, const char* what) {
  if (!cond) throw fgmfc::InvalidArgument(what);
}

fgmfc_status coeff_at(const fgmfc_solution* sol, bool forward, int s, const int* k, double* re,
                      double* im) {
  return guarded([&] {
    require(sol != nullptr && k != nullptr && re != nullptr && im != nullptr, "null argument");
    const auto& path = forward ? sol->sol.forward : sol->sol.backward;
    require(s >= 0 && s < static_cast<int>(path.nodes.size()), "time node out of range");
    const auto& node = path.nodes[static_cast<std::size_t>(s)];
    std::vector<int> mode(k, k + node.dim());
    for (int c : mode) require(std::abs(c) <= node.band(), "mode outside the stored band");
    const fgmfc::Complex v = node.at(mode);
    *re = v.real();
    *im = v.imag();
  });
}

}  // namespace

extern "C" {

const char* fgmfc_last_error(void) { return g_last_error.c_str(); }

const char* fgmfc_version(void) { return "0.1.0"; }

void fgmfc_string_free(char* s) { std::free(s); }

fgmfc_status fgmfc_config_load(const char* path, fgmfc_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new fgmfc_config{fgmfc::load_config(path)};
  });
}

fgmfc_status fgmfc_config_parse(const char* json_text, fgmfc_config** out) {
  return guarded([&] {
    require(json_text != nullptr && out != nullptr, "null argument");
    *out = new fgmfc_config{fgmfc::parse_config(json_text)};
  });
}

void fgmfc_config_free(fgmfc_config* cfg) { delete cfg; }

fgmfc_status fgmfc_config_json(const fgmfc_config* cfg, char** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = dup_string(cfg->ec.canonical_json);
  });
}

fgmfc_status fgmfc_config_warnings(const fgmfc_config* cfg, char** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    std::string text;
    for (const auto& w : cfg->ec.warnings) text += w + "\n";
    *out = dup_string(text);
  });
}

fgmfc_status fgmfc_config_output_dir(const fgmfc_config* cfg, char** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = dup_string(cfg->ec.output_dir);
  });
}

fgmfc_status fgmfc_solve(const fgmfc_config* cfg, fgmfc_solution** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = new fgmfc_solution{cfg->ec, fgmfc::solve_config(cfg->ec)};
  });
}

void fgmfc_solution_free(fgmfc_solution* sol) { delete sol; }

fgmfc_status fgmfc_solution_report_json(const fgmfc_solution* sol, char** out) {
  return guarded([&] {
    require(sol != nullptr && out != nullptr, "null argument");
    *out = dup_string(fgmfc::report_to_json(sol->sol.report));
  });
}

fgmfc_status fgmfc_solution_write(const fgmfc_solution* sol, const char* dir) {
  return guarded([&] {
    require(sol != nullptr && dir != nullptr, "null argument");
    fgmfc::write_solution(sol->ec, sol->sol, dir);
  });
}

fgmfc_status fgmfc_solution_forward_coeff(const fgmfc_solution* sol, int s, const int* k, double* re,
                                          double* im) {
  return coeff_at(sol, true, s, k, re, im);
}

fgmfc_status fgmfc_solution_backward_coeff(const fgmfc_solution* sol, int s, const int* k, double* re,
                                           double* im) {
  return coeff_at(sol, false, s, k, re, im);
}

fgmfc_status fgmfc_sweep(const fgmfc_config* cfg, const char* dir) {
  return guarded([&] {
    require(cfg != nullptr && dir != nullptr, "null argument");
    const fgmfc::ErrorTable table = fgmfc::run_sweep(cfg->ec);
    std::error_code err;
    std::filesystem::create_directories(dir, err);
    if (err) throw fgmfc::IoError(std::string("cannot create directory '") + dir + "': " + err.message());
    const std::filesystem::path base(dir);
    fgmfc::write_text((base / "config.json").string(), cfg->ec.canonical_json);
    fgmfc::write_text((base / "errors.csv").string(), fgmfc::errors_csv(table));
    fgmfc::write_text((base / "class_value.csv").string(), fgmfc::class_value_csv(table, cfg->ec));
    fgmfc::write_text((base / "report.json").string(), fgmfc::sweep_report_json(table));
  });
}

fgmfc_status fgmfc_check(const fgmfc_config* cfg, const char* dir, char** report_json, int* all_passed) {
  return guarded([&] {
    require(cfg != nullptr, "null argument");
    const fgmfc::CheckReport rep = fgmfc::run_checks(cfg->ec);
    const std::string text = rep.to_json();
    if (dir != nullptr) {
      std::error_code err;
      std::filesystem::create_directories(dir, err);
      if (err) throw fgmfc::IoError(std::string("cannot create directory '") + dir + "': " + err.message());
      fgmfc::write_text((std::filesystem::path(dir) / "config.json").string(), cfg->ec.canonical_json);
      fgmfc::write_text((std::filesystem::path(dir) / "checks.json").string(), text);
    }
    if (report_json != nullptr) *report_json = dup_string(text);
    if (all_passed != nullptr) *all_passed = rep.all_passed() ? 1 : 0;
  });
}

fgmfc_status fgmfc_value(const fgmfc_config* cfg, int t_index, double* out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    const auto& ec = cfg->ec;
    *out = fgmfc::value_V_N(t_index, fgmfc::make_initial(ec), fgmfc::make_costs(ec),
                            fgmfc::make_hamiltonian(ec), ec.problem, ec.picard);
  });
}

fgmfc_status fgmfc_truncate_csv(const char* in_path, int band, char** out) {
  return guarded([&] {
    require(in_path != nullptr && out != nullptr, "null argument");
    const fgmfc::SpectralField f = fgmfc::read_field_csv(in_path);
    *out = dup_string(fgmfc::field_to_csv(fgmfc::dirichlet_truncate(f, band)));
  });
}

}  // extern "C"
