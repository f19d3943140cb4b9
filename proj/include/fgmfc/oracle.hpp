// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "fgmfc/fbsolver.hpp"

namespace fgmfc::oracle {

/// Reference integrator for d = 1 and H(x,p) = |p|^2/2, independent of the
/// pseudo-spectral machinery: the nonlinear terms are direct coefficient
/// convolutions and time stepping is classical RK4 with a fine step. Path
/// values between nodes come from cubic Lagrange interpolation.
struct DenseProblem {
  int band = 2;         // N
  int remainder_band = 6;  // K_max
  double horizon = 0.1;
  int steps = 4096;
  MfcCosts costs;
  double cutoff = 50.0;  // |u_x| must stay below this
  bool init_truncated = false;
};

using PathFunction = std::function<SpectralField(double t)>;

/// Cubic interpolation of a coefficient path in time.
PathFunction interpolate(const CoefficientPath& path);

/// Backward system for a given flow nu (band N), on the problem's fine grid.
CoefficientPath backward(const PathFunction& nu, const DenseProblem& pb);

/// Forward system on modes |k| <= K_max for a given potential u (band N).
CoefficientPath forward(const PathFunction& u, const SpectralField& m, const DenseProblem& pb);

struct DenseSolution {
  CoefficientPath forward;   // band K_max
  CoefficientPath backward;  // band N
  int iterations = 0;
  double residual = 0.0;
};

/// Undamped Picard iteration of the two sweeps from the heat flow of m * D^N.
DenseSolution solve(const SpectralField& m, const DenseProblem& pb, double tol = 1e-14,
                    int max_iter = 100);

}  // namespace fgmfc::oracle
