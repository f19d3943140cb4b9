// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "fgmfc/error.hpp"
#include "fgmfc/model.hpp"
#include "fgmfc/spectral.hpp"

namespace fgmfc {

enum class PathRole { kForward, kBackward, kFlow, kControl };

const char* to_string(PathRole role);

/// Coefficient fields on the uniform time grid t_s = s T / S, s = 0..S.
struct CoefficientPath {
  double horizon = 1.0;
  int steps = 1;
  PathRole role = PathRole::kFlow;
  std::vector<SpectralField> nodes;

  double time(int s) const { return horizon * s / steps; }
  int dim() const { return nodes.front().dim(); }
  int band() const { return nodes.front().band(); }
};

/// Running cost F and terminal cost G.
struct MfcCosts {
  CostModel running;
  CostModel terminal;
};

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 1.0;  // theta in nu <- (1 - theta) nu + theta Phi(nu)
};

struct SolveReport {
  int picard_iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
  double final_damping = 1.0;
  /// min over time x grid of mu^N and of mu^N * D^N.
  double min_density = 0.0;
  double min_density_truncated = 0.0;
  bool probability_valued = true;
  bool truncated_probability_valued = true;
  long cutoff_activations = 0;
  /// max over time of the largest |mu(k)| on the outermost retained shell.
  double remainder_tail_estimate = 0.0;
  double wall_time_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Solution of the truncated forward-backward system.
struct FBSolution {
  CoefficientPath forward;   // band K_max
  CoefficientPath backward;  // band N
  SolveReport report;
};

class FixedPointFailure : public Error {
 public:
  FixedPointFailure(const std::string& what, std::vector<double> history)
      : Error(ErrorCode::kFixedPointFailure, what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Band-N coefficients of x -> H~(x, grad u(x)) and of x -> D_p H~(x, grad u(x)).
struct NonlinearTerms {
  SpectralField hamiltonian;
  std::vector<SpectralField> drift;
  long saturated_points = 0;
};

/// Pseudo-spectral evaluation: gradient, synthesis on a `resolution` grid,
/// pointwise model evaluation, analysis and truncation to band n.
/// Requires band(u) <= n and resolution >= 4n + 1.
NonlinearTerms nonlinear_coeffs(const SpectralField& u, const HamiltonianModel& hm, int n,
                                int resolution);

/// Heat flow of m * D^N on the time grid of `cfg` (exact diagonal solution).
CoefficientPath heat_flow(const SpectralField& m, const ProblemConfig& cfg);

/// Backward nonlocal Hamilton-Jacobi system on modes |k| <= N:
///   d/dt u(k) = |2 pi k|^2 u(k) - dF(nu_t)(k) + H(., grad u_t)(k),
///   u_T(k) = dG(nu_T)(k),
/// integrated by the integrating-factor Heun scheme. `nu` must be a flow of
/// band-N probability coefficients (PreconditionViolation otherwise). The
/// cutoff Hamiltonian is used unless `hm` already is one.
CoefficientPath backward_solve(const CoefficientPath& nu, const MfcCosts& costs,
                               const HamiltonianModel& hm, const ProblemConfig& cfg);

/// Forward truncated Fokker-Planck system on modes |k| <= N:
///   d/dt mu(k) = -|2 pi k|^2 mu(k) + i 2 pi k . (D_p H(., grad u_t) (mu_t * D^N))^(k),
/// from mu_0 = m * D^N, with mu(0) held at 1.
CoefficientPath forward_solve(const CoefficientPath& u, const SpectralField& m,
                              const HamiltonianModel& hm, const ProblemConfig& cfg);

/// Modes N < |k| <= K_max of the forward solution: linear ODEs forced by the
/// already computed low modes. Returns the full band-K_max path (low modes
/// copied from `low`). High modes start from m(k), or from zero when
/// cfg.init_truncated is set.
CoefficientPath remainder_solve(const CoefficientPath& u, const CoefficientPath& low,
                                const SpectralField& m, const HamiltonianModel& hm,
                                const ProblemConfig& cfg);

/// Damped Picard iteration nu <- (1 - theta) nu + theta (mu^{N,nu} * D^N) from
/// the heat flow of m * D^N, followed by the remainder solve.
/// Throws FixedPointFailure when max_iter is exceeded.
FBSolution picard_solve(const SpectralField& m, const MfcCosts& costs, const HamiltonianModel& hm,
                        const ProblemConfig& cfg, const PicardOptions& picard = {});

/// picard_solve at band `reference_band` (remainder band 4 x reference_band),
/// the stand-in for the untruncated solution.
FBSolution solve_reference(const SpectralField& m, const MfcCosts& costs,
                           const HamiltonianModel& hm, const ProblemConfig& cfg,
                           int reference_band, const PicardOptions& picard = {});

struct DualityGap {
  double lhs = 0.0;  // int_0^T <|grad u2 - grad u1|^2, (mu1 + mu2) * D^N> dt
  double rhs = 0.0;  // <m1 - m2, u1_0 - u2_0>
  double ratio = 0.0;
};

/// Stability bracket between two solutions of the same configuration started
/// from different initial data.
DualityGap duality_gap(const FBSolution& sol1, const FBSolution& sol2, const ProblemConfig& cfg);

}  // namespace fgmfc
