// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "fgmfc/harness.hpp"
#include "fgmfc/model.hpp"

using namespace fgmfc;

namespace {

SpectralField cosine(int k, double amp = 1.0) {
  SpectralField f(1, std::abs(k));
  f.set({k}, 0.5 * amp);
  f.set({-k}, 0.5 * amp);
  return f;
}

SpectralField density(double amp) {
  SpectralField f = cosine(1, amp);
  f.set({0}, 1.0);
  return f;
}

}  // namespace

TEST_CASE("quadratic Lagrangian") {
  const HamiltonianModel hm = quadratic_hamiltonian(2);
  const std::vector<double> x{0.1, 0.3}, a{2.0, 0.0};
  CHECK(legendre_lagrangian(hm, x, a) == doctest::Approx(2.0));
  CHECK(numeric_legendre_lagrangian(hm, x, a) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("drift Lagrangian is |a + nu|^2 / 2") {
  const HamiltonianModel hm = quadratic_drift_hamiltonian(1, 0.7);
  for (double xv : {0.0, 0.13, 0.4, 0.77})
    for (double av : {-1.5, 0.0, 0.3, 2.0}) {
      const std::vector<double> x{xv}, a{av};
      const double nu = quadratic_drift_field(x, 0.7)[0];
      const double expected = 0.5 * (av + nu) * (av + nu);
      CHECK(legendre_lagrangian(hm, x, a) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(numeric_legendre_lagrangian(hm, x, a) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("cutoff Hamiltonian") {
  const HamiltonianModel base = quadratic_hamiltonian(1, 1.25, 2.0);
  const HamiltonianModel hm = cutoff_hamiltonian(base);
  CHECK(hm.is_cutoff());
  const std::vector<double> x{0.2};
  double g = 0.0;
  for (double p : {-1.5, 0.0, 1.0, 1.9}) {
    const std::vector<double> pv{p};
    CHECK(hm.value(x, pv) == doctest::Approx(0.5 * p * p));
    hm.gradient(x, pv, std::span<double>(&g, 1));
    CHECK(g == doctest::Approx(p));
    CHECK_FALSE(hm.saturated(x, pv));
  }
  // Beyond |p| = 2 the gradient is clamped and the value continues linearly.
  for (double p : {3.0, -5.0}) {
    const std::vector<double> pv{p};
    hm.gradient(x, pv, std::span<double>(&g, 1));
    CHECK(g == doctest::Approx(std::copysign(2.0, p)));
    CHECK(hm.value(x, pv) == doctest::Approx(2.0 + 2.0 * (std::abs(p) - 2.0)));
    CHECK(hm.saturated(x, pv));
  }
}

TEST_CASE("convexity probe") {
  const ConvexityProbe p = probe_convexity(quadratic_hamiltonian(2), 50, 3);
  CHECK(p.within_bounds);
  CHECK(p.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(p.max_eigenvalue == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_FALSE(probe_convexity(quadratic_hamiltonian(1, 0.9), 10, 3).within_bounds);
}

TEST_CASE("cylindrical cost") {
  const CostModel lin = builtin_cost_cylindrical(phi_linear({1.0}), {cosine(1)});
  const SpectralField uniform = SpectralField::constant(1, 1.0);
  CHECK(lin.value(uniform) == doctest::Approx(0.0));
  const SpectralField d = lin.flat_derivative(uniform);
  CHECK(l2_error(dirichlet_truncate(d, 1), cosine(1)) <= 1e-15);

  const CostModel quad = builtin_cost_cylindrical(phi_quadratic({1.0}), {cosine(1)});
  CHECK(quad.value(density(0.5)) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("negative Sobolev cost") {
  const SpectralField mu0 = SpectralField::constant(1, 1.0);
  std::vector<std::string> warnings;
  const CostModel c = builtin_cost_negative_sobolev(mu0, 3, 1.0, &warnings);
  CHECK(warnings.empty());
  CHECK(c.value(mu0) == 0.0);
  CHECK(sobolev_norm(c.flat_derivative(mu0), 0.0) == 0.0);
  const SpectralField mu = mu0.with_band(1) + cosine(1);
  CHECK(c.value(mu) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  builtin_cost_negative_sobolev(mu0, 2, 1.0, &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("monotonicity bracket and flat derivative") {
  const SpectralField a = sample_class_member(1, 4, 0.5, 20.0, 1);
  const SpectralField b = sample_class_member(1, 4, 0.5, 20.0, 2);
  const CostModel convex = builtin_cost_negative_sobolev(SpectralField::constant(1, 1.0), 3);
  CHECK(monotonicity_bracket(convex, a, b) >= 0.0);
  CHECK(std::abs(flat_derivative_defect(convex, a, b)) <= 1e-12);
  const CostModel concave = builtin_cost_cylindrical(phi_quadratic({-1.0}), {cosine(1)});
  CHECK(monotonicity_bracket(concave, density(0.5), density(-0.5)) < 0.0);
  CHECK(std::abs(flat_derivative_defect(concave, a, b)) <= 1e-12);
  CHECK(zero_cost(1).is_zero);
  CHECK(zero_cost(1).value(a) == 0.0);
}

TEST_CASE("problem config validation") {
  ProblemConfig cfg;
  CHECK(cfg.validate().empty());
  CHECK(cfg.effective_remainder_band() == 32);
  CHECK(cfg.grid_resolution() >= 65);
  cfg.smoothness = 3;
  CHECK(cfg.validate().size() == 1);
  cfg = ProblemConfig{};
  cfg.band = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ProblemConfig{};
  cfg.density_floor = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ProblemConfig{};
  cfg.grid = 8;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
