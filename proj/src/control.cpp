// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fgmfc/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dynamics.hpp"

namespace fgmfc {

namespace {

ProblemConfig tail_config(const ProblemConfig& cfg, int t_index) {
  if (t_index < 0 || t_index > cfg.steps) {
    std::ostringstream os;
    os << "time index " << t_index << " outside 0.." << cfg.steps;
    throw InvalidArgument(os.str());
  }
  ProblemConfig out = cfg;
  out.grid = cfg.grid_resolution();
  if (t_index == cfg.steps) return out;
  out.horizon = cfg.horizon - cfg.dt() * t_index;
  out.steps = cfg.steps - t_index;
  return out;
}

void check_alignment(const FeedbackControl& alpha, const ProblemConfig& cfg) {
  if (alpha.steps != cfg.steps || static_cast<int>(alpha.zeta.size()) != cfg.steps + 1)
    throw InvalidArgument("feedback time grid does not match the configuration");
  if (alpha.band() > cfg.band) throw InvalidArgument("feedback band exceeds N");
  if (alpha.resolution != cfg.grid_resolution())
    throw InvalidArgument("feedback grid resolution does not match the configuration");
}

// Forward drift D_pH = -a of the controlled equation on nodes t_index..S.
std::vector<detail::VectorGrid> controlled_drift(const FeedbackControl& alpha, int t_index) {
  std::vector<detail::VectorGrid> drift;
  for (std::size_t s = static_cast<std::size_t>(t_index); s < alpha.grid.size(); ++s) {
    detail::VectorGrid d = alpha.grid[s];
    for (auto& comp : d)
      for (double& v : comp) v = -v;
    drift.push_back(std::move(d));
  }
  return drift;
}

// Cost of a band-N state path xi under the feedback, nodes t_index..S.
CostBreakdown evaluate_cost(const FeedbackControl& alpha, int t_index, const CoefficientPath& xi,
                            const MfcCosts& costs, const HamiltonianModel& hm,
                            const ProblemConfig& sub) {
  const int dim = sub.dim;
  const int g = sub.grid_resolution();
  const auto xs = detail::grid_coordinates(dim, g);
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t count = grid_point_count(dim, g);

  std::vector<double> f_vals(xi.nodes.size()), l_vals(xi.nodes.size());
  double min_density = std::numeric_limits<double>::infinity();
  std::vector<double> a(d);
  for (std::size_t s = 0; s < xi.nodes.size(); ++s) {
    const SpectralField& node = xi.nodes[s];
    const auto rho = to_grid(node, g).values;
    min_density = std::min(min_density, *std::min_element(rho.begin(), rho.end()));
    f_vals[s] = costs.running.is_zero ? 0.0 : costs.running.value(node);
    const auto& ag = alpha.grid[static_cast<std::size_t>(t_index) + s];
    double acc = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
      for (std::size_t i = 0; i < d; ++i) a[i] = ag[i][p];
      acc += legendre_lagrangian(hm, PointRef(xs.data() + p * d, d), a) * rho[p];
    }
    l_vals[s] = acc / static_cast<double>(count);
  }
  const double h = sub.dt();
  CostBreakdown out;
  for (std::size_t s = 0; s + 1 < xi.nodes.size(); ++s) {
    out.running_F += 0.5 * h * (f_vals[s] + f_vals[s + 1]);
    out.running_L += 0.5 * h * (l_vals[s] + l_vals[s + 1]);
  }
  if (xi.nodes.size() == 1) {
    out.running_F = 0.0;
    out.running_L = 0.0;
  }
  out.terminal = costs.terminal.is_zero ? 0.0 : costs.terminal.value(xi.nodes.back());
  out.total = out.terminal + out.running_F + out.running_L;
  out.min_density = min_density;
  out.admissible = min_density >= -1e-12;
  return out;
}

CoefficientPath single_node(const SpectralField& f, const ProblemConfig& sub) {
  CoefficientPath p;
  p.horizon = sub.horizon;
  p.steps = sub.steps;
  p.role = PathRole::kForward;
  p.nodes.push_back(f);
  return p;
}

}  // namespace

FeedbackControl feedback_from_weights(std::vector<SpectralField> zeta, const HamiltonianModel& hm,
                                      const ProblemConfig& cfg) {
  if (static_cast<int>(zeta.size()) != cfg.steps + 1)
    throw InvalidArgument("feedback weights need one field per time node");
  FeedbackControl out;
  out.horizon = cfg.horizon;
  out.steps = cfg.steps;
  out.resolution = cfg.grid_resolution();
  for (auto& z : zeta) z.symmetrize();
  out.zeta = std::move(zeta);
  CoefficientPath path;
  path.horizon = cfg.horizon;
  path.steps = cfg.steps;
  path.role = PathRole::kControl;
  path.nodes = out.zeta;
  const auto drift = detail::drift_path(path, detail::solver_hamiltonian(hm), out.resolution, nullptr);
  out.grid.reserve(drift.size());
  for (const auto& node : drift) {
    auto a = node;
    for (auto& comp : a)
      for (double& v : comp) v = -v;
    out.grid.push_back(std::move(a));
  }
  return out;
}

FeedbackControl optimal_feedback(const FBSolution& sol, const HamiltonianModel& hm,
                                 const ProblemConfig& cfg) {
  return feedback_from_weights(sol.backward.nodes, hm, cfg);
}

FeedbackControl perturbed_feedback(const FeedbackControl& alpha, const SpectralField& beta,
                                   double eps, const HamiltonianModel& hm,
                                   const ProblemConfig& cfg) {
  std::vector<SpectralField> zeta;
  zeta.reserve(alpha.zeta.size());
  for (const auto& z : alpha.zeta) {
    SpectralField b = beta.with_band(z.band());
    b *= eps;
    zeta.push_back(z + b);
  }
  return feedback_from_weights(std::move(zeta), hm, cfg);
}

SpectralField random_direction(int dim, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField out(dim, band);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(normal(rng), normal(rng));
  out[out.zero_index()] = 0.0;
  out.symmetrize();
  const double norm = sobolev_norm(out, 0.0);
  if (norm > 0.0) out *= 1.0 / norm;
  return out;
}

CostBreakdown cost_J_N(const FeedbackControl& alpha, int t_index, const SpectralField& m,
                       const MfcCosts& costs, const HamiltonianModel& hm, const ProblemConfig& cfg) {
  cfg.validate();
  check_alignment(alpha, cfg);
  const ProblemConfig sub = tail_config(cfg, t_index);
  if (std::abs(m[m.zero_index()] - 1.0) > 1e-12)
    throw PreconditionViolation("initial measure must have unit mass");
  CoefficientPath xi;
  if (t_index == cfg.steps) {
    xi = single_node(dirichlet_truncate(m, cfg.band).with_band(cfg.band), sub);
  } else {
    const auto drift = controlled_drift(alpha, t_index);
    const CoefficientPath low = detail::forward_with_drift(drift, m, sub);
    const CoefficientPath full = detail::remainder_with_drift(drift, low, m, sub, nullptr);
    xi = full;
    for (auto& node : xi.nodes) node = dirichlet_truncate(node, cfg.band);
  }
  return evaluate_cost(alpha, t_index, xi, costs, hm, sub);
}

CostBreakdown gamma_N_cost(const FeedbackControl& alpha, int t_index, const SpectralField& z,
                           const MfcCosts& costs, const HamiltonianModel& hm,
                           const ProblemConfig& cfg) {
  cfg.validate();
  check_alignment(alpha, cfg);
  if (z.band() > cfg.band) throw InvalidArgument("state z must have band <= N");
  const auto rep = is_probability_coeffs(z, cfg.grid_resolution(), 1e-10);
  if (!rep.ok) throw PreconditionViolation("state z is not a probability coefficient vector");
  const ProblemConfig sub = tail_config(cfg, t_index);
  const SpectralField start = z.with_band(cfg.band);
  CoefficientPath xi = t_index == cfg.steps
                           ? single_node(start, sub)
                           : detail::forward_with_drift(controlled_drift(alpha, t_index), start, sub);
  return evaluate_cost(alpha, t_index, xi, costs, hm, sub);
}

double value_V_N(int t_index, const SpectralField& m, const MfcCosts& costs,
                 const HamiltonianModel& hm, const ProblemConfig& cfg,
                 const PicardOptions& picard) {
  cfg.validate();
  const ProblemConfig sub = tail_config(cfg, t_index);
  if (t_index == cfg.steps) {
    const SpectralField tr = dirichlet_truncate(m, cfg.band);
    return costs.terminal.is_zero ? 0.0 : costs.terminal.value(tr);
  }
  const FBSolution sol = picard_solve(m, costs, hm, sub, picard);
  const FeedbackControl alpha = optimal_feedback(sol, hm, sub);
  return cost_J_N(alpha, 0, m, costs, hm, sub).total;
}

AdmissibilityReport admissibility_check(const FeedbackControl& alpha, double c_bound) {
  AdmissibilityReport out;
  for (const auto& z : alpha.zeta) {
    const int power = 2 * z.dim() + 6;
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      sum += std::pow(static_cast<double>(z.mode_norm(i)), power) * std::norm(z[i]);
    out.weighted_sums.push_back(sum);
    out.margins.push_back(c_bound - sum);
    if (sum > c_bound) out.ok = false;
  }
  return out;
}

double legendre_defect(const FBSolution& sol, const FeedbackControl& alpha,
                       const HamiltonianModel& hm) {
  const int dim = alpha.dim();
  const auto d = static_cast<std::size_t>(dim);
  const int g = alpha.resolution;
  const auto xs = detail::grid_coordinates(dim, g);
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> a(d), p(d);
  for (std::size_t s = 0; s < sol.backward.nodes.size(); ++s) {
    const auto grad = detail::gradient_on_grid(sol.backward.nodes[s], g);
    for (std::size_t pt = 0; pt < grad.front().size(); ++pt) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        a[i] = alpha.grid[s][i][pt];
        p[i] = grad[i][pt];
        dot += a[i] * p[i];
      }
      const PointRef x(xs.data() + pt * d, d);
      worst = std::max(worst, legendre_lagrangian(hm, x, a) + hm.value(x, p) + dot);
    }
  }
  return worst;
}

}  // namespace fgmfc
