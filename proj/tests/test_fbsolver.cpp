// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fgmfc/fbsolver.hpp"
#include "fgmfc/harness.hpp"
#include "fgmfc/oracle.hpp"

using namespace fgmfc;

namespace {

SpectralField benchmark_initial() {
  SpectralField m(1, 1);
  m.set({0}, 1.0);
  m.set({1}, 0.25);
  m.set({-1}, 0.25);
  return m;
}

MfcCosts benchmark_costs() {
  const SpectralField mu0 = SpectralField::constant(1, 1.0);
  return {builtin_cost_negative_sobolev(mu0, 3), builtin_cost_negative_sobolev(mu0, 3)};
}

MfcCosts zero_costs() { return {zero_cost(1), zero_cost(1)}; }

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  const SpectralField d = a - b;
  double e = 0.0;
  for (const auto& c : d.coeffs()) e = std::max(e, std::abs(c));
  return e;
}

}  // namespace

TEST_CASE("nonlinear_coeffs") {
  const HamiltonianModel hm = quadratic_hamiltonian(1);
  const NonlinearTerms zero = nonlinear_coeffs(SpectralField(1, 4), hm, 4, 17);
  CHECK(sobolev_norm(zero.hamiltonian, 0.0) == 0.0);
  CHECK(sobolev_norm(zero.drift[0], 0.0) == 0.0);

  // u = sin(2 pi x) / (2 pi): H(grad u) = cos^2(2 pi x) / 2 = 1/4 + cos(4 pi x) / 4.
  SpectralField u(1, 4);
  u.set({1}, Complex(0.0, -0.5 / kTwoPi));
  u.set({-1}, Complex(0.0, 0.5 / kTwoPi));
  const NonlinearTerms t = nonlinear_coeffs(u, hm, 4, 17);
  CHECK(std::abs(t.hamiltonian.at({0}) - 0.25) <= 1e-14);
  CHECK(std::abs(t.hamiltonian.at({2}) - 0.125) <= 1e-14);
  CHECK(std::abs(t.hamiltonian.at({-2}) - 0.125) <= 1e-14);
  CHECK(std::abs(t.hamiltonian.at({1})) <= 1e-14);
  const NonlinearTerms t1 = nonlinear_coeffs(u.with_band(1), hm, 1, 5);
  CHECK(std::abs(t1.hamiltonian.at({0}) - 0.25) <= 1e-14);
  CHECK(t1.hamiltonian.band() == 1);
  CHECK_THROWS_AS(nonlinear_coeffs(u, hm, 4, 8), InvalidArgument);
}

TEST_CASE("pure heat flow") {
  ProblemConfig cfg;
  cfg.band = 8;
  cfg.horizon = 0.25;
  cfg.steps = 256;
  const SpectralField m = benchmark_initial();
  const FBSolution sol = picard_solve(m, zero_costs(), quadratic_hamiltonian(1), cfg);
  CHECK(sol.report.picard_iterations <= 1);
  double worst = 0.0;
  for (int s = 0; s <= cfg.steps; ++s) {
    const double t = sol.forward.time(s);
    const auto& node = sol.forward.nodes[s];
    for (std::size_t i = 0; i < node.size(); ++i) {
      const int k = node.mode_at(i).components[0];
      const Complex expected = std::abs(k) <= 1 ? m.at({k}) * std::exp(-kTwoPi * kTwoPi * k * k * t) : 0.0;
      worst = std::max(worst, std::abs(node[i] - expected));
    }
    for (const auto& c : sol.backward.nodes[s].coeffs()) CHECK(c == Complex(0.0, 0.0));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("backward_solve rejects non-probability flows") {
  ProblemConfig cfg;
  cfg.band = 2;
  cfg.steps = 4;
  CoefficientPath nu = heat_flow(benchmark_initial(), cfg);
  const HamiltonianModel hm = quadratic_hamiltonian(1);
  CHECK_NOTHROW(backward_solve(nu, benchmark_costs(), hm, cfg));
  nu.nodes[2].set({1}, 2.0);
  nu.nodes[2].set({-1}, 2.0);
  CHECK_THROWS_AS(backward_solve(nu, benchmark_costs(), hm, cfg), PreconditionViolation);
}

TEST_CASE("forward_solve requires unit mass") {
  ProblemConfig cfg;
  cfg.band = 2;
  cfg.steps = 4;
  const CoefficientPath u = backward_solve(heat_flow(benchmark_initial(), cfg), benchmark_costs(),
                                           quadratic_hamiltonian(1), cfg);
  SpectralField m = benchmark_initial();
  m.set({0}, 1.5);
  CHECK_THROWS_AS(forward_solve(u, m, quadratic_hamiltonian(1), cfg), PreconditionViolation);
}

TEST_CASE("remainder modes are pure heat when u vanishes") {
  ProblemConfig cfg;
  cfg.band = 2;
  cfg.remainder_band = 6;
  cfg.horizon = 0.05;
  cfg.steps = 32;
  SpectralField m(1, 5);
  m.set({0}, 1.0);
  m.set({4}, 0.1);
  m.set({-4}, 0.1);
  m.set({5}, Complex(0.0, 0.05));
  m.set({-5}, Complex(0.0, -0.05));
  CoefficientPath u = heat_flow(m, cfg);
  for (auto& node : u.nodes) node = SpectralField(1, 2);
  const HamiltonianModel hm = quadratic_hamiltonian(1);
  const CoefficientPath low = forward_solve(u, m, hm, cfg);
  const CoefficientPath full = remainder_solve(u, low, m, hm, cfg);
  CHECK(full.band() == 6);
  for (int s = 0; s <= cfg.steps; ++s)
    for (int k : {4, 5, -5}) {
      const Complex expected = m.at({k}) * std::exp(-kTwoPi * kTwoPi * k * k * full.time(s));
      CHECK(std::abs(full.nodes[s].at({k}) - expected) <= 1e-12);
    }
  cfg.init_truncated = true;
  const CoefficientPath trunc = remainder_solve(u, low, m, hm, cfg);
  for (const auto& node : trunc.nodes) CHECK(node.at({4}) == Complex(0.0, 0.0));
}

TEST_CASE("benchmark Picard convergence") {
  ProblemConfig cfg;
  cfg.band = 4;
  cfg.horizon = 0.5;
  const FBSolution sol = picard_solve(benchmark_initial(), benchmark_costs(), quadratic_hamiltonian(1), cfg);
  CHECK(sol.report.final_residual <= 1e-9);
  CHECK(sol.report.picard_iterations <= 50);
  CHECK(sol.report.probability_valued);
  CHECK(sol.report.min_density > 0.0);
  CHECK(sol.forward.band() == 16);
  CHECK(sol.backward.band() == 4);
  for (const auto& node : sol.forward.nodes) {
    CHECK(std::abs(node[node.zero_index()] - 1.0) <= 1e-10);
    CHECK(node.hermitian_defect() <= 1e-14);
  }
  const FBSolution again = picard_solve(benchmark_initial(), benchmark_costs(), quadratic_hamiltonian(1), cfg);
  for (int s = 0; s <= cfg.steps; ++s) CHECK(again.forward.nodes[s] == sol.forward.nodes[s]);
}

TEST_CASE("Picard failure is reported") {
  ProblemConfig cfg;
  cfg.band = 4;
  cfg.horizon = 0.5;
  PicardOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-30;
  CHECK_THROWS_AS(picard_solve(benchmark_initial(), benchmark_costs(), quadratic_hamiltonian(1), cfg, opts),
                  FixedPointFailure);
}

TEST_CASE("agreement with the dense oracle") {
  oracle::DenseProblem pb;
  pb.costs = benchmark_costs();
  const SpectralField m = benchmark_initial();
  const oracle::DenseSolution dense = oracle::solve(m, pb);
  ProblemConfig cfg;
  cfg.band = 2;
  cfg.remainder_band = 6;
  cfg.horizon = 0.1;
  cfg.steps = 256;
  PicardOptions opts;
  opts.tol = 1e-14;
  const FBSolution sol = picard_solve(m, pb.costs, quadratic_hamiltonian(1), cfg, opts);
  const int stride = pb.steps / cfg.steps;
  double e = 0.0;
  for (int s = 0; s <= cfg.steps; ++s) {
    e = std::max(e, max_coeff_diff(sol.forward.nodes[s], dense.forward.nodes[s * stride]));
    e = std::max(e, max_coeff_diff(sol.backward.nodes[s], dense.backward.nodes[s * stride]));
  }
  CHECK(e <= 1e-6);
}

TEST_CASE("duality gap") {
  ProblemConfig cfg;
  cfg.band = 4;
  cfg.horizon = 0.5;
  const HamiltonianModel hm = quadratic_hamiltonian(1);
  const MfcCosts costs = benchmark_costs();
  const FBSolution s1 = picard_solve(sample_class_member(1, 4, 0.5, 20.0, 5), costs, hm, cfg);
  const DualityGap same = duality_gap(s1, s1, cfg);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  const FBSolution s2 = picard_solve(sample_class_member(1, 4, 0.5, 20.0, 6), costs, hm, cfg);
  const DualityGap gap = duality_gap(s1, s2, cfg);
  CHECK(gap.rhs >= -1e-10);
  CHECK(gap.lhs <= 2.0 * hm.convexity_bound * 1.02 * gap.rhs);
}
