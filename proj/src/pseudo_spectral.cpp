// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pseudo_spectral.hpp"

#include <cmath>

namespace fgmfc::detail {

std::vector<double> grid_coordinates(int dim, int resolution) {
  const std::size_t count = grid_point_count(dim, resolution);
  std::vector<double> xs(count * static_cast<std::size_t>(dim));
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  for (std::size_t p = 0; p < count; ++p) {
    for (int i = 0; i < dim; ++i)
      xs[p * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i)] =
          static_cast<double>(idx[i]) / resolution;
    for (int i = dim - 1; i >= 0; --i) {
      if (++idx[i] < resolution) break;
      idx[i] = 0;
    }
  }
  return xs;
}

VectorGrid gradient_on_grid(const SpectralField& u, int resolution) {
  VectorGrid out;
  for (const auto& component : gradient(u))
    out.push_back(to_grid(component, resolution).values);
  return out;
}

HamiltonianSamples sample_hamiltonian(const SpectralField& u, const HamiltonianModel& hm,
                                      int resolution, bool want_value, bool want_drift) {
  const int dim = u.dim();
  const auto d = static_cast<std::size_t>(dim);
  const VectorGrid grad = gradient_on_grid(u, resolution);
  const std::vector<double> xs = grid_coordinates(dim, resolution);
  const std::size_t count = grad.front().size();

  HamiltonianSamples s;
  if (want_value) s.value.resize(count);
  if (want_drift) s.drift.assign(d, std::vector<double>(count));
  std::vector<double> p(d), g(d);
  for (std::size_t pt = 0; pt < count; ++pt) {
    for (std::size_t i = 0; i < d; ++i) p[i] = grad[i][pt];
    const PointRef x(xs.data() + pt * d, d);
    if (want_value) s.value[pt] = hm.value(x, p);
    if (want_drift) {
      hm.gradient(x, p, g);
      for (std::size_t i = 0; i < d; ++i) s.drift[i][pt] = g[i];
    }
    if (hm.saturated && hm.saturated(x, p)) ++s.saturated;
  }
  return s;
}

SpectralField analyze(const std::vector<double>& values, int dim, int resolution, int band) {
  GridField g;
  g.dim = dim;
  g.resolution = resolution;
  g.values = values;
  return from_grid(g, band);
}

SpectralField transport_term(const VectorGrid& drift, const std::vector<double>& rho, int dim,
                             int resolution, int band) {
  SpectralField out(dim, band);
  std::vector<double> flux(rho.size());
  for (int i = 0; i < dim; ++i) {
    const auto& di = drift[static_cast<std::size_t>(i)];
    for (std::size_t p = 0; p < rho.size(); ++p) flux[p] = di[p] * rho[p];
    const SpectralField fh = analyze(flux, dim, resolution, band);
    // k_i of the flat index: (flat / side^(d-1-i)) mod side - band.
    std::size_t stride = 1;
    for (int j = i + 1; j < dim; ++j) stride *= static_cast<std::size_t>(2 * band + 1);
    const auto side = static_cast<std::size_t>(2 * band + 1);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      const int ki = static_cast<int>((flat / stride) % side) - band;
      out[flat] += Complex(0.0, kTwoPi * ki) * fh[flat];
    }
  }
  return out;
}

std::vector<double> heat_rates(int dim, int band) {
  SpectralField layout(dim, band);
  std::vector<double> rates(layout.size());
  for (std::size_t flat = 0; flat < layout.size(); ++flat) {
    double k2 = 0.0;
    for (int c : layout.mode_at(flat).components) k2 += static_cast<double>(c) * c;
    rates[flat] = kTwoPi * kTwoPi * k2;
  }
  return rates;
}

}  // namespace fgmfc::detail
