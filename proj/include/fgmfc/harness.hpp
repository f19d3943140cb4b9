// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fgmfc/control.hpp"
#include "fgmfc/fbsolver.hpp"

namespace fgmfc {

/// Parameters of a cost entry of the configuration.
struct CostSpec {
  std::string type = "zero";  // zero | neg_sobolev | cylindrical
  int r = 3;
  double weight = 1.0;
  std::string phi = "linear";  // linear | quadratic | neg_quadratic
  std::vector<double> phi_weights;
  /// Cylindrical test functions cos(2 pi k.x) scaled by an amplitude.
  std::vector<std::pair<std::vector<int>, double>> psis;
};

struct HamiltonianSpec {
  std::string type = "quadratic";  // quadratic | quadratic_drift
  double convexity = 1.25;
  double cutoff = 50.0;
  double drift_amplitude = 0.0;
};

struct InitialSpec {
  std::string type = "cosine";  // uniform | cosine | coefficients | file
  double amplitude = 0.5;
  std::vector<int> mode;  // default (1, 0, ..., 0)
  std::vector<std::pair<std::vector<int>, Complex>> coefficients;
  std::string path;
};

/// Complete description of a run, read from a single JSON document.
struct ExperimentConfig {
  ProblemConfig problem;
  HamiltonianSpec hamiltonian;
  CostSpec running_cost;
  CostSpec terminal_cost;
  InitialSpec initial;
  PicardOptions picard;
  std::vector<int> sweep = {4, 8, 16};
  int reference_band = 64;
  std::uint64_t seed = 1;
  std::string output_dir = "fgmfc_out";
  /// Class B^{q,gamma}_R: ||m||^2_{2,q-1} <= R and m >= gamma.
  double class_radius = 20.0;
  int class_samples = 5;
  /// Canonical JSON text of the configuration (all defaults filled in).
  std::string canonical_json;
  /// Non-fatal findings of validation.
  std::vector<std::string> warnings;
};

/// Parses and validates a configuration. Unknown keys and invalid values raise
/// ConfigError. Relative initial-data paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

HamiltonianModel make_hamiltonian(const ExperimentConfig& ec);
MfcCosts make_costs(const ExperimentConfig& ec, std::vector<std::string>* warnings = nullptr);
SpectralField make_initial(const ExperimentConfig& ec);

/// Seeded random Hermitian field with coefficients ~ N(0,1) (1 + |k|^2)^{-decay/2}.
SpectralField random_smooth_field(int dim, int band, double decay, std::uint64_t seed);

/// Seeded member of B^{q,gamma}_R with modes 1 <= |k| <= 3: the non-constant
/// part has coefficient l1-norm <= 1 - gamma, so m >= gamma everywhere.
SpectralField sample_class_member(int dim, int smoothness, double gamma, double radius,
                                  std::uint64_t seed);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Half-width of the 95% confidence interval of the slope (0 for 2 points).
  double ci95 = 0.0;
  /// Root-mean-square residual in log coordinates.
  double residual = 0.0;
  int points = 0;
};

/// Least-squares slope of log(err) against log(N). Needs >= 2 points with
/// err > 0 (InsufficientData otherwise).
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct ErrorRow {
  int band = 0;
  bool failed = false;
  std::string message;
  double mu_l2 = 0.0;
  double mu_linf = 0.0;
  double gradu_l2t = 0.0;
  double feedback_linf = 0.0;
  double value_abs = 0.0;
  double min_density = 0.0;
  double min_density_trunc = 0.0;
  double value = 0.0;
};

/// Fit of one metric, or why there is none.
struct MetricFit {
  std::optional<RateFit> fit;
  /// Every sweep error is at or below the round-off floor; the decay is
  /// faster than any rate the sweep can resolve.
  bool at_floor = false;
  std::string note;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
  std::map<std::string, MetricFit> slopes;  // keyed by errors.csv column name
  SolveReport reference_report;
  double reference_value = 0.0;
  /// |V^N - V^ref| per class sample (rows) and sweep point (columns).
  std::vector<std::vector<double>> class_value_errors;
  MetricFit class_value_slope;
};

/// Errors at or below this level count as round-off.
inline constexpr double kRoundoffFloor = 1e-13;

/// Reference solve at N_ref, then every sweep band, all metrics against the
/// reference, slope fits, and the class-uniform value errors.
ErrorTable run_sweep(const ExperimentConfig& ec);

std::string errors_csv(const ErrorTable& table);
std::string class_value_csv(const ErrorTable& table, const ExperimentConfig& ec);
std::string sweep_report_json(const ErrorTable& table);

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckResult> checks;
  /// (N, min density of mu^N, min density of mu^N * D^N) for N = 1..8.
  std::vector<std::tuple<int, double, double>> positivity_scan;
  bool all_passed() const;
  std::string to_json() const;
};

/// Property suite: truncation lemmas, mass and symmetry, duality,
/// optimality, positivity, cost and Hamiltonian probes, identification of
/// the value functions, and oracle agreement (d = 1, quadratic H).
CheckReport run_checks(const ExperimentConfig& ec);

/// Writes the solution paths, report.json and config.json into the output directory.
void write_solution(const ExperimentConfig& ec, const FBSolution& sol, const std::string& dir);

/// Solve of the configured problem.
FBSolution solve_config(const ExperimentConfig& ec);

}  // namespace fgmfc
