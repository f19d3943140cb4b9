// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "fgmfc/fbsolver.hpp"
#include "pseudo_spectral.hpp"

namespace fgmfc::detail {

// Grid samples of D_p H(x, grad u_s(x)) at every node of `u`.
std::vector<VectorGrid> drift_path(const CoefficientPath& u, const HamiltonianModel& hm,
                                   int resolution, long* saturated);

// Band-N forward system driven by the drift samples (one per time node).
CoefficientPath forward_with_drift(const std::vector<VectorGrid>& drift, const SpectralField& m,
                                   const ProblemConfig& cfg);

// Remainder modes N < |k| <= K_max for the same drift and the solved low modes.
CoefficientPath remainder_with_drift(const std::vector<VectorGrid>& drift,
                                     const CoefficientPath& low, const SpectralField& m,
                                     const ProblemConfig& cfg, double* tail_estimate);

// The cutoff model used by the solver for `hm`.
HamiltonianModel solver_hamiltonian(const HamiltonianModel& hm);

}  // namespace fgmfc::detail
