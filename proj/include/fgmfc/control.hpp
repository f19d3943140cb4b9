// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "fgmfc/fbsolver.hpp"

namespace fgmfc {

/// Feedback a_t(x) = -D_p H(x, grad zeta_t(x)) with band-N weights zeta_t,
/// stored per time node together with its grid samples.
struct FeedbackControl {
  double horizon = 1.0;
  int steps = 1;
  int resolution = 0;
  std::vector<SpectralField> zeta;
  /// grid[s][i][p]: component i of a_{t_s} at grid point p.
  std::vector<std::vector<std::vector<double>>> grid;

  int dim() const { return zeta.front().dim(); }
  int band() const { return zeta.front().band(); }
};

struct CostBreakdown {
  double terminal = 0.0;
  double running_F = 0.0;
  double running_L = 0.0;
  double total = 0.0;
  /// mu * D^N stayed probability-valued at every node from t_index on.
  bool admissible = true;
  double min_density = 0.0;
};

/// Builds the feedback of the weights `zeta` (one band-N field per node of cfg).
FeedbackControl feedback_from_weights(std::vector<SpectralField> zeta, const HamiltonianModel& hm,
                                      const ProblemConfig& cfg);

/// a* = -D_p H(., grad u^N), the minimizer of the truncated problem.
FeedbackControl optimal_feedback(const FBSolution& sol, const HamiltonianModel& hm,
                                 const ProblemConfig& cfg);

/// Same weights shifted by eps * beta at every node.
FeedbackControl perturbed_feedback(const FeedbackControl& alpha, const SpectralField& beta,
                                   double eps, const HamiltonianModel& hm,
                                   const ProblemConfig& cfg);

/// Seeded random band-N Hermitian field with zero mean mode and unit L2 norm.
SpectralField random_direction(int dim, int band, std::uint64_t seed);

/// J^N(a, t_s, m) = G(mu_T * D^N) + int_{t_s}^T F(mu * D^N) + <L(., a), mu * D^N> dt
/// along the controlled forward equation started from m at t_s. The full
/// band-K_max state is integrated and truncated for evaluation; an
/// inadmissible trajectory is flagged, not rejected.
CostBreakdown cost_J_N(const FeedbackControl& alpha, int t_index, const SpectralField& m,
                       const MfcCosts& costs, const HamiltonianModel& hm, const ProblemConfig& cfg);

/// The finite-dimensional cost of the band-N state started from the
/// probability coefficients z at t_s. Throws PreconditionViolation otherwise.
CostBreakdown gamma_N_cost(const FeedbackControl& alpha, int t_index, const SpectralField& z,
                           const MfcCosts& costs, const HamiltonianModel& hm,
                           const ProblemConfig& cfg);

/// V^N(t_s, m): solves the truncated system on [t_s, T] and evaluates J^N at
/// its optimal feedback.
double value_V_N(int t_index, const SpectralField& m, const MfcCosts& costs,
                 const HamiltonianModel& hm, const ProblemConfig& cfg,
                 const PicardOptions& picard = {});

struct AdmissibilityReport {
  bool ok = true;
  /// sum_{|l| <= N} |l|^{2d+6} |zeta_s(l)|^2 per node.
  std::vector<double> weighted_sums;
  /// C_bound minus the weighted sum, per node.
  std::vector<double> margins;
};

AdmissibilityReport admissibility_check(const FeedbackControl& alpha, double c_bound);

/// max over nodes and grid of L(x, a*) + H(x, grad u) + a*.grad u.
double legendre_defect(const FBSolution& sol, const FeedbackControl& alpha,
                       const HamiltonianModel& hm);

}  // namespace fgmfc
