// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "fgmfc/model.hpp"
#include "fgmfc/spectral.hpp"

namespace fgmfc::detail {

// Per-component grid samples of a vector field, each of size resolution^d.
using VectorGrid = std::vector<std::vector<double>>;

// Coordinates of all grid points, point-major (d doubles per point).
std::vector<double> grid_coordinates(int dim, int resolution);

// Grid samples of grad u.
VectorGrid gradient_on_grid(const SpectralField& u, int resolution);

struct HamiltonianSamples {
  std::vector<double> value;  // H(x, grad u(x))
  VectorGrid drift;           // D_p H(x, grad u(x))
  long saturated = 0;         // grid points where the cutoff clamp was active
};

// Evaluates the model pointwise on grad u. `want_value` / `want_drift` skip
// work that a caller does not need.
HamiltonianSamples sample_hamiltonian(const SpectralField& u, const HamiltonianModel& hm,
                                      int resolution, bool want_value, bool want_drift);

// Coefficients |k| <= band of the real grid function `values`.
SpectralField analyze(const std::vector<double>& values, int dim, int resolution, int band);

// Coefficients i 2 pi k . (flux * rho)^(k) for |k| <= band, where rho is given on
// the grid. This is the transport term of the truncated Fokker-Planck equation.
SpectralField transport_term(const VectorGrid& drift, const std::vector<double>& rho, int dim,
                             int resolution, int band);

// Laplacian eigenvalues |2 pi k|^2 (Euclidean |k|) in the layout of a (dim, band) field.
std::vector<double> heat_rates(int dim, int band);

}  // namespace fgmfc::detail
