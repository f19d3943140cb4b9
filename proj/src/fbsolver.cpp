// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fgmfc/fbsolver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "dynamics.hpp"

namespace fgmfc {

namespace {

using detail::VectorGrid;

HamiltonianModel effective_hamiltonian(const HamiltonianModel& hm) {
  return hm.is_cutoff() ? hm : cutoff_hamiltonian(hm);
}

void require_finite(const SpectralField& f, const char* stage, int node) {
  for (const auto& c : f.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream os;
      os << stage << ": non-finite coefficient at time node " << node;
      throw NumericFailure(os.str());
    }
  }
}

std::vector<double> decay_factors(const std::vector<double>& rates, double h) {
  std::vector<double> e(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) e[i] = std::exp(-rates[i] * h);
  return e;
}

// One integrating-factor Heun step for y' = -rate y + R(y):
//   y* = E (y + h R(y_n)),  y_{n+1} = E y_n + h/2 (E R(y_n) + R_next(y*)).
template <class RhsNext>
SpectralField heun_step(const SpectralField& y, const SpectralField& r_now,
                        const std::vector<double>& decay, double h, RhsNext&& rhs_next) {
  SpectralField pred = y;
  for (std::size_t i = 0; i < y.size(); ++i) pred[i] = decay[i] * (y[i] + h * r_now[i]);
  const SpectralField r_next = rhs_next(pred);
  SpectralField out = y;
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = decay[i] * y[i] + 0.5 * h * (decay[i] * r_now[i] + r_next[i]);
  return out.symmetrize();
}

SpectralField truncated_derivative(const CostModel& cm, const SpectralField& mu, int n) {
  if (cm.is_zero) return SpectralField(mu.dim(), n);
  SpectralField d = cm.flat_derivative(mu).with_band(n);
  return d.symmetrize();
}

SpectralField hamiltonian_term(const SpectralField& u, const HamiltonianModel& hm, int n,
                               int resolution) {
  const auto s = detail::sample_hamiltonian(u, hm, resolution, true, false);
  return detail::analyze(s.value, u.dim(), resolution, n);
}

CoefficientPath backward_impl(const CoefficientPath& nu, const MfcCosts& costs,
                              const HamiltonianModel& hm, const ProblemConfig& cfg) {
  const int n = cfg.band;
  const int dim = cfg.dim;
  const int g = cfg.grid_resolution();
  const int steps = cfg.steps;
  const double h = cfg.dt();
  const auto decay = decay_factors(detail::heat_rates(dim, n), h);

  std::vector<SpectralField> running(static_cast<std::size_t>(steps + 1));
  for (int s = 0; s <= steps; ++s) running[s] = truncated_derivative(costs.running, nu.nodes[s], n);

  // In reversed time tau = T - t: dU/dtau = -|2 pi k|^2 U + dF(nu) - H(grad U).
  auto rhs = [&](const SpectralField& u, int s) {
    SpectralField r = running[s];
    r -= hamiltonian_term(u, hm, n, g);
    return r;
  };

  CoefficientPath out;
  out.horizon = cfg.horizon;
  out.steps = steps;
  out.role = PathRole::kBackward;
  out.nodes.resize(static_cast<std::size_t>(steps + 1));
  out.nodes[steps] = truncated_derivative(costs.terminal, nu.nodes[steps], n);
  require_finite(out.nodes[steps], "backward_solve", steps);
  for (int s = steps; s > 0; --s) {
    const SpectralField& y = out.nodes[s];
    out.nodes[s - 1] = heun_step(y, rhs(y, s), decay, h,
                                 [&](const SpectralField& pred) { return rhs(pred, s - 1); });
    require_finite(out.nodes[s - 1], "backward_solve", s - 1);
  }
  return out;
}

std::vector<VectorGrid> drift_samples(const CoefficientPath& u, const HamiltonianModel& hm,
                                      int resolution, long* saturated) {
  std::vector<VectorGrid> drift;
  drift.reserve(u.nodes.size());
  long count = 0;
  for (const auto& node : u.nodes) {
    auto s = detail::sample_hamiltonian(node, hm, resolution, false, true);
    count += s.saturated;
    drift.push_back(std::move(s.drift));
  }
  if (saturated != nullptr) *saturated = count;
  return drift;
}

void require_unit_mass(const SpectralField& m) {
  const double defect = std::abs(m[m.zero_index()] - 1.0);
  if (defect > 1e-12) {
    std::ostringstream os;
    os << "initial measure must have unit mass (|m(0) - 1| = " << defect << ")";
    throw PreconditionViolation(os.str());
  }
}

CoefficientPath forward_impl(const std::vector<VectorGrid>& drift, const SpectralField& m,
                             const ProblemConfig& cfg) {
  const int n = cfg.band;
  const int dim = cfg.dim;
  const int g = cfg.grid_resolution();
  const int steps = cfg.steps;
  const double h = cfg.dt();
  const auto decay = decay_factors(detail::heat_rates(dim, n), h);

  auto rhs = [&](const SpectralField& mu, int s) {
    return detail::transport_term(drift[s], to_grid(mu, g).values, dim, g, n);
  };

  CoefficientPath out;
  out.horizon = cfg.horizon;
  out.steps = steps;
  out.role = PathRole::kForward;
  out.nodes.resize(static_cast<std::size_t>(steps + 1));
  SpectralField start = m.with_band(n);
  start[start.zero_index()] = 1.0;
  out.nodes[0] = start.symmetrize();
  for (int s = 0; s < steps; ++s) {
    const SpectralField& y = out.nodes[s];
    SpectralField next = heun_step(y, rhs(y, s), decay, h,
                                   [&](const SpectralField& pred) { return rhs(pred, s + 1); });
    next[next.zero_index()] = 1.0;
    require_finite(next, "forward_solve", s + 1);
    out.nodes[s + 1] = std::move(next);
  }
  return out;
}

CoefficientPath remainder_impl(const std::vector<VectorGrid>& drift, const CoefficientPath& low,
                               const SpectralField& m, const ProblemConfig& cfg,
                               double* tail_estimate) {
  const int n = cfg.band;
  const int kmax = cfg.effective_remainder_band();
  if (kmax < low.band()) throw InvalidArgument("remainder band K_max must be >= N");
  const int dim = cfg.dim;
  const int g = cfg.grid_resolution();
  const int steps = cfg.steps;
  const double h = cfg.dt();
  const auto decay = decay_factors(detail::heat_rates(dim, kmax), h);

  SpectralField layout(dim, kmax);
  std::vector<char> high(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) high[i] = layout.mode_norm(i) > n;

  // Forcing g_k(t_s) = i 2 pi k . (D_p H (mu_s * D^N))^(k) depends on low modes only.
  auto forcing = [&](int s) {
    return detail::transport_term(drift[s], to_grid(low.nodes[s], g).values, dim, g, kmax);
  };

  CoefficientPath out;
  out.horizon = cfg.horizon;
  out.steps = steps;
  out.role = PathRole::kForward;
  out.nodes.resize(static_cast<std::size_t>(steps + 1));

  SpectralField y = cfg.init_truncated ? SpectralField(dim, kmax) : m.with_band(kmax);
  {
    const SpectralField lo = low.nodes[0].with_band(kmax);
    for (std::size_t i = 0; i < y.size(); ++i)
      if (!high[i]) y[i] = lo[i];
  }
  out.nodes[0] = y;
  SpectralField g_now = forcing(0);
  for (int s = 0; s < steps; ++s) {
    const SpectralField g_next = forcing(s + 1);
    const SpectralField lo = low.nodes[s + 1].with_band(kmax);
    SpectralField next(dim, kmax);
    for (std::size_t i = 0; i < y.size(); ++i) {
      next[i] = high[i] ? decay[i] * y[i] + 0.5 * h * (decay[i] * g_now[i] + g_next[i]) : lo[i];
    }
    next.symmetrize();
    require_finite(next, "remainder_solve", s + 1);
    out.nodes[s + 1] = next;
    y = std::move(next);
    g_now = g_next;
  }

  if (tail_estimate != nullptr) {
    double tail = 0.0;
    for (const auto& node : out.nodes)
      for (std::size_t i = 0; i < node.size(); ++i)
        if (node.mode_norm(i) == kmax) tail = std::max(tail, std::abs(node[i]));
    *tail_estimate = tail;
  }
  return out;
}

double sup_distance(const CoefficientPath& a, const CoefficientPath& b) {
  double d = 0.0;
  for (std::size_t s = 0; s < a.nodes.size(); ++s) d = std::max(d, l2_error(a.nodes[s], b.nodes[s]));
  return d;
}

}  // namespace

namespace detail {

std::vector<VectorGrid> drift_path(const CoefficientPath& u, const HamiltonianModel& hm,
                                   int resolution, long* saturated) {
  return drift_samples(u, hm, resolution, saturated);
}

CoefficientPath forward_with_drift(const std::vector<VectorGrid>& drift, const SpectralField& m,
                                   const ProblemConfig& cfg) {
  return forward_impl(drift, m, cfg);
}

CoefficientPath remainder_with_drift(const std::vector<VectorGrid>& drift,
                                     const CoefficientPath& low, const SpectralField& m,
                                     const ProblemConfig& cfg, double* tail_estimate) {
  return remainder_impl(drift, low, m, cfg, tail_estimate);
}

HamiltonianModel solver_hamiltonian(const HamiltonianModel& hm) {
  return effective_hamiltonian(hm);
}

}  // namespace detail

const char* to_string(PathRole role) {
  switch (role) {
    case PathRole::kForward:
      return "forward";
    case PathRole::kBackward:
      return "backward";
    case PathRole::kFlow:
      return "flow";
    case PathRole::kControl:
      return "control";
  }
  return "unknown";
}

NonlinearTerms nonlinear_coeffs(const SpectralField& u, const HamiltonianModel& hm, int n,
                                int resolution) {
  if (u.band() > n) throw InvalidArgument("nonlinear_coeffs: band(u) exceeds N");
  if (resolution < 4 * n + 1) {
    std::ostringstream os;
    os << "nonlinear_coeffs: grid " << resolution << " too small for N = " << n
       << " (need >= " << 4 * n + 1 << ")";
    throw InvalidArgument(os.str());
  }
  const auto s = detail::sample_hamiltonian(u, hm, resolution, true, true);
  NonlinearTerms out;
  out.hamiltonian = detail::analyze(s.value, u.dim(), resolution, n);
  for (const auto& comp : s.drift) out.drift.push_back(detail::analyze(comp, u.dim(), resolution, n));
  out.saturated_points = s.saturated;
  return out;
}

CoefficientPath heat_flow(const SpectralField& m, const ProblemConfig& cfg) {
  const auto rates = detail::heat_rates(cfg.dim, cfg.band);
  const SpectralField start = m.with_band(cfg.band);
  CoefficientPath out;
  out.horizon = cfg.horizon;
  out.steps = cfg.steps;
  out.role = PathRole::kFlow;
  for (int s = 0; s <= cfg.steps; ++s) {
    SpectralField node = start;
    const double t = out.time(s);
    for (std::size_t i = 0; i < node.size(); ++i) node[i] *= std::exp(-rates[i] * t);
    out.nodes.push_back(std::move(node));
  }
  return out;
}

CoefficientPath backward_solve(const CoefficientPath& nu, const MfcCosts& costs,
                               const HamiltonianModel& hm, const ProblemConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(nu.nodes.size()) != cfg.steps + 1)
    throw InvalidArgument("backward_solve: flow has the wrong number of time nodes");
  const int g = cfg.grid_resolution();
  for (std::size_t s = 0; s < nu.nodes.size(); ++s) {
    const auto& node = nu.nodes[s];
    if (node.band() > cfg.band) throw InvalidArgument("backward_solve: flow band exceeds N");
    const auto rep = is_probability_coeffs(node, g, 1e-9);
    if (!rep.ok) {
      std::ostringstream os;
      os << "backward_solve: flow is not probability-valued at node " << s
         << " (mass defect " << rep.mass_defect << ", hermitian defect " << rep.hermitian_defect
         << ", min density " << rep.min_density << ")";
      throw PreconditionViolation(os.str());
    }
  }
  return backward_impl(nu, costs, effective_hamiltonian(hm), cfg);
}

CoefficientPath forward_solve(const CoefficientPath& u, const SpectralField& m,
                              const HamiltonianModel& hm, const ProblemConfig& cfg) {
  cfg.validate();
  if (u.band() > cfg.band) throw InvalidArgument("forward_solve: band(u) exceeds N");
  if (static_cast<int>(u.nodes.size()) != cfg.steps + 1)
    throw InvalidArgument("forward_solve: potential has the wrong number of time nodes");
  require_unit_mass(m);
  const auto drift = drift_samples(u, effective_hamiltonian(hm), cfg.grid_resolution(), nullptr);
  return forward_impl(drift, m, cfg);
}

CoefficientPath remainder_solve(const CoefficientPath& u, const CoefficientPath& low,
                                const SpectralField& m, const HamiltonianModel& hm,
                                const ProblemConfig& cfg) {
  cfg.validate();
  if (low.band() != cfg.band) throw InvalidArgument("remainder_solve: low modes must have band N");
  const auto drift = drift_samples(u, effective_hamiltonian(hm), cfg.grid_resolution(), nullptr);
  return remainder_impl(drift, low, m, cfg, nullptr);
}

FBSolution picard_solve(const SpectralField& m, const MfcCosts& costs, const HamiltonianModel& hm,
                        const ProblemConfig& cfg, const PicardOptions& picard) {
  const auto started = std::chrono::steady_clock::now();
  FBSolution sol;
  sol.report.warnings = cfg.validate();
  if (m.dim() != cfg.dim) throw InvalidArgument("initial measure has the wrong dimension");
  if (!(picard.damping > 0.0 && picard.damping <= 1.0))
    throw InvalidArgument("Picard damping must lie in (0, 1]");
  require_unit_mass(m);
  if (m.band() > cfg.effective_remainder_band()) {
    sol.report.warnings.push_back("initial measure has modes above K_max; they are dropped");
  }

  const HamiltonianModel htilde = effective_hamiltonian(hm);
  const int g = cfg.grid_resolution();

  CoefficientPath nu = heat_flow(m, cfg);
  CoefficientPath u, mu;
  double theta = picard.damping;
  double previous = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 1; it <= picard.max_iter; ++it) {
    u = backward_impl(nu, costs, htilde, cfg);
    mu = forward_impl(drift_samples(u, htilde, g, nullptr), m, cfg);
    const double gap = sup_distance(mu, nu);
    const double increment = theta * gap;
    sol.report.residual_history.push_back(increment);
    sol.report.picard_iterations = it;
    sol.report.final_residual = increment;
    if (increment <= picard.tol) {
      converged = true;
      break;
    }
    if (gap > previous) theta = std::max(std::min(theta, 1.0) * 0.5, 1.0 / 64.0);
    previous = gap;
    for (std::size_t s = 0; s < nu.nodes.size(); ++s) {
      SpectralField next = (1.0 - theta) * nu.nodes[s];
      next += theta * mu.nodes[s];
      nu.nodes[s] = std::move(next);
    }
  }
  sol.report.final_damping = theta;
  if (!converged) {
    std::ostringstream os;
    os << "Picard iteration did not reach tolerance " << picard.tol << " in " << picard.max_iter
       << " iterations (last increment " << sol.report.final_residual << ")";
    throw FixedPointFailure(os.str(), sol.report.residual_history);
  }

  long saturated = 0;
  const auto drift = drift_samples(u, htilde, g, &saturated);
  sol.report.cutoff_activations = saturated;
  if (saturated > 0)
    sol.report.warnings.push_back("cutoff Hamiltonian active: solution leaves the |D_pH| <= M regime");
  sol.forward = remainder_impl(drift, mu, m, cfg, &sol.report.remainder_tail_estimate);
  sol.backward = std::move(u);

  double min_full = std::numeric_limits<double>::infinity();
  double min_trunc = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sol.forward.nodes.size(); ++s) {
    min_full = std::min(min_full, min_on_grid(sol.forward.nodes[s], g));
    min_trunc = std::min(min_trunc, min_on_grid(mu.nodes[s], g));
  }
  sol.report.min_density = min_full;
  sol.report.min_density_truncated = min_trunc;
  sol.report.probability_valued = min_full >= 0.0;
  sol.report.truncated_probability_valued = min_trunc >= 0.0;
  if (!sol.report.probability_valued || !sol.report.truncated_probability_valued) {
    std::ostringstream os;
    os << "negative density (min " << min_full << ", truncated min " << min_trunc
       << "): N = " << cfg.band << " is below the empirical positivity threshold";
    sol.report.warnings.push_back(os.str());
  }
  sol.report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return sol;
}

FBSolution solve_reference(const SpectralField& m, const MfcCosts& costs,
                           const HamiltonianModel& hm, const ProblemConfig& cfg,
                           int reference_band, const PicardOptions& picard) {
  ProblemConfig ref = cfg;
  ref.band = reference_band;
  ref.remainder_band = 4 * reference_band;
  ref.grid = 0;
  return picard_solve(m, costs, hm, ref, picard);
}

DualityGap duality_gap(const FBSolution& sol1, const FBSolution& sol2, const ProblemConfig& cfg) {
  const int n = cfg.band;
  const int g = cfg.grid_resolution();
  const auto& u1 = sol1.backward.nodes;
  const auto& u2 = sol2.backward.nodes;
  if (u1.size() != u2.size()) throw InvalidArgument("duality_gap: solutions use different time grids");

  std::vector<double> integrand(u1.size());
  for (std::size_t s = 0; s < u1.size(); ++s) {
    const auto grad = detail::gradient_on_grid(u2[s] - u1[s], g);
    const SpectralField rho_hat =
        dirichlet_truncate(sol1.forward.nodes[s], n) + dirichlet_truncate(sol2.forward.nodes[s], n);
    const auto rho = to_grid(rho_hat, g).values;
    double acc = 0.0;
    for (std::size_t p = 0; p < rho.size(); ++p) {
      double sq = 0.0;
      for (const auto& comp : grad) sq += comp[p] * comp[p];
      acc += sq * rho[p];
    }
    integrand[s] = acc / static_cast<double>(rho.size());
  }
  const double h = cfg.dt();
  double lhs = 0.0;
  for (std::size_t s = 0; s + 1 < integrand.size(); ++s) lhs += 0.5 * h * (integrand[s] + integrand[s + 1]);

  DualityGap gap;
  gap.lhs = lhs;
  gap.rhs = pairing(dirichlet_truncate(sol1.forward.nodes[0], n) -
                        dirichlet_truncate(sol2.forward.nodes[0], n),
                    u1[0] - u2[0]);
  gap.ratio = gap.rhs != 0.0 ? gap.lhs / gap.rhs : 0.0;
  return gap;
}

}  // namespace fgmfc
