// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fgmfc/harness.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dynamics.hpp"
#include "fgmfc/io.hpp"
#include "fgmfc/oracle.hpp"

namespace fgmfc {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ProblemConfig at_band(const ProblemConfig& base, int n) {
  ProblemConfig cfg = base;
  cfg.band = n;
  cfg.remainder_band = base.remainder_band > 0 ? std::max(base.remainder_band, n) : 0;
  cfg.grid = 0;
  return cfg;
}

ProblemConfig reference_config(const ProblemConfig& base, int n_ref) {
  ProblemConfig cfg = base;
  cfg.band = n_ref;
  cfg.remainder_band = 4 * n_ref;
  cfg.grid = 0;
  return cfg;
}

double path_sup(const CoefficientPath& a, const CoefficientPath& b,
                const std::function<double(const SpectralField&, const SpectralField&)>& metric) {
  double out = 0.0;
  for (std::size_t s = 0; s < a.nodes.size(); ++s) out = std::max(out, metric(a.nodes[s], b.nodes[s]));
  return out;
}

// int_0^T ||grad u - grad v||_2^2 dt by Parseval and the trapezoid rule.
double gradient_l2t(const CoefficientPath& u, const CoefficientPath& v) {
  std::vector<double> vals;
  for (std::size_t s = 0; s < u.nodes.size(); ++s) {
    const auto gu = gradient(u.nodes[s]);
    const auto gv = gradient(v.nodes[s]);
    double acc = 0.0;
    for (std::size_t i = 0; i < gu.size(); ++i) acc += std::pow(l2_error(gu[i], gv[i]), 2);
    vals.push_back(acc);
  }
  const double h = u.horizon / u.steps;
  double out = 0.0;
  for (std::size_t s = 0; s + 1 < vals.size(); ++s) out += 0.5 * h * (vals[s] + vals[s + 1]);
  return out;
}

// sup over nodes and grid of |D_p H(x, grad u) - D_p H(x, grad v)|.
double feedback_sup(const std::vector<detail::VectorGrid>& a, const std::vector<detail::VectorGrid>& b) {
  double out = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t p = 0; p < a[s].front().size(); ++p) {
      double sq = 0.0;
      for (std::size_t i = 0; i < a[s].size(); ++i) sq += std::pow(a[s][i][p] - b[s][i][p], 2);
      out = std::max(out, std::sqrt(sq));
    }
  return out;
}

double optimal_value(const FBSolution& sol, const SpectralField& m, const MfcCosts& costs,
                     const HamiltonianModel& hm, const ProblemConfig& cfg) {
  return cost_J_N(optimal_feedback(sol, hm, cfg), 0, m, costs, hm, cfg).total;
}

MetricFit fit_metric(const std::vector<std::pair<double, double>>& points, double floor) {
  MetricFit mf;
  if (points.size() < 2) {
    mf.note = "fewer than 2 successful sweep points";
    return mf;
  }
  bool all_floor = true;
  for (const auto& [n, e] : points) all_floor = all_floor && e <= floor;
  mf.at_floor = all_floor;
  try {
    mf.fit = fit_rate(points);
  } catch (const InsufficientData& e) {
    mf.note = e.what();
  }
  if (all_floor) mf.note = "all errors at or below the round-off floor; slope is not resolvable";
  return mf;
}

json fit_json(const MetricFit& mf) {
  json j;
  if (mf.fit) {
    j["slope"] = mf.fit->slope;
    j["ci95"] = mf.fit->ci95;
    j["residual"] = mf.fit->residual;
    j["points"] = mf.fit->points;
  } else {
    j["slope"] = nullptr;
  }
  j["at_floor"] = mf.at_floor;
  j["note"] = mf.note;
  return j;
}

}  // namespace

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> x, y;
  for (const auto& [n, e] : points) {
    if (n > 0.0 && e > 0.0 && std::isfinite(e)) {
      x.push_back(std::log(n));
      y.push_back(std::log(e));
    }
  }
  if (x.size() < 2) throw InsufficientData("rate fit needs at least 2 points with positive error");
  const double count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw InsufficientData("rate fit needs at least 2 distinct N");
  RateFit fit;
  fit.points = static_cast<int>(x.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ssr += std::pow(y[i] - fit.intercept - fit.slope * x[i], 2);
  fit.residual = std::sqrt(ssr / count);
  if (x.size() > 2) {
    const double dof = count - 2.0;
    const boost::math::students_t dist(dof);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.ci95 = t * std::sqrt(ssr / dof / sxx);
  }
  return fit;
}

ErrorTable run_sweep(const ExperimentConfig& ec) {
  const HamiltonianModel hm = make_hamiltonian(ec);
  const MfcCosts costs = make_costs(ec);
  const SpectralField m = make_initial(ec);
  const ProblemConfig ref_cfg = reference_config(ec.problem, ec.reference_band);
  const int g_ref = ref_cfg.grid_resolution();
  const HamiltonianModel htilde = detail::solver_hamiltonian(hm);

  ErrorTable table;
  const FBSolution ref = picard_solve(m, costs, hm, ref_cfg, ec.picard);
  table.reference_report = ref.report;
  table.reference_value = optimal_value(ref, m, costs, hm, ref_cfg);
  const auto drift_ref = detail::drift_path(ref.backward, htilde, g_ref, nullptr);

  for (int n : ec.sweep) {
    ErrorRow row;
    row.band = n;
    const ProblemConfig cfg = at_band(ec.problem, n);
    try {
      const FBSolution sol = picard_solve(m, costs, hm, cfg, ec.picard);
      row.mu_l2 = path_sup(sol.forward, ref.forward, [](const SpectralField& a, const SpectralField& b) {
        return l2_error(a, b);
      });
      row.mu_linf = path_sup(sol.forward, ref.forward, [g_ref](const SpectralField& a, const SpectralField& b) {
        return linf_error(a, b, g_ref);
      });
      row.gradu_l2t = gradient_l2t(sol.backward, ref.backward);
      row.feedback_linf = feedback_sup(detail::drift_path(sol.backward, htilde, g_ref, nullptr), drift_ref);
      row.value = optimal_value(sol, m, costs, hm, cfg);
      row.value_abs = std::abs(row.value - table.reference_value);
      row.min_density = sol.report.min_density;
      row.min_density_trunc = sol.report.min_density_truncated;
    } catch (const Error& e) {
      row.failed = true;
      row.message = e.what();
      row.mu_l2 = row.mu_linf = row.gradu_l2t = row.feedback_linf = row.value_abs = kNaN;
      row.min_density = row.min_density_trunc = row.value = kNaN;
    }
    table.rows.push_back(row);
  }

  const auto collect = [&](double ErrorRow::*field) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : table.rows)
      if (!r.failed) pts.emplace_back(r.band, r.*field);
    return pts;
  };
  table.slopes["mu_l2"] = fit_metric(collect(&ErrorRow::mu_l2), kRoundoffFloor);
  table.slopes["mu_linf"] = fit_metric(collect(&ErrorRow::mu_linf), kRoundoffFloor);
  table.slopes["gradu_l2t"] = fit_metric(collect(&ErrorRow::gradu_l2t), kRoundoffFloor * kRoundoffFloor);
  table.slopes["feedback_linf"] = fit_metric(collect(&ErrorRow::feedback_linf), kRoundoffFloor);
  table.slopes["value_abs"] = fit_metric(collect(&ErrorRow::value_abs), kRoundoffFloor);

  // Uniform-in-class value errors over a seeded family of initial data.
  std::vector<double> sup(ec.sweep.size(), 0.0);
  std::vector<char> ok(ec.sweep.size(), 1);
  for (int j = 0; j < ec.class_samples; ++j) {
    const SpectralField mj = sample_class_member(ec.problem.dim, ec.problem.smoothness,
                                                 ec.problem.density_floor, ec.class_radius,
                                                 ec.seed * 1000003ull + static_cast<std::uint64_t>(j));
    std::vector<double> errs(ec.sweep.size(), kNaN);
    try {
      const FBSolution rj = picard_solve(mj, costs, hm, ref_cfg, ec.picard);
      const double vref = optimal_value(rj, mj, costs, hm, ref_cfg);
      for (std::size_t i = 0; i < ec.sweep.size(); ++i) {
        try {
          const ProblemConfig cfg = at_band(ec.problem, ec.sweep[i]);
          const FBSolution sj = picard_solve(mj, costs, hm, cfg, ec.picard);
          errs[i] = std::abs(optimal_value(sj, mj, costs, hm, cfg) - vref);
          sup[i] = std::max(sup[i], errs[i]);
        } catch (const Error&) {
          ok[i] = 0;
        }
      }
    } catch (const Error&) {
      std::fill(ok.begin(), ok.end(), 0);
    }
    table.class_value_errors.push_back(errs);
  }
  if (ec.class_samples > 0) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < ec.sweep.size(); ++i)
      if (ok[i]) pts.emplace_back(ec.sweep[i], sup[i]);
    table.class_value_slope = fit_metric(pts, kRoundoffFloor);
  }
  return table;
}

std::string errors_csv(const ErrorTable& table) {
  std::string out = "N,mu_l2,mu_linf,gradu_l2t,feedback_linf,value_abs,min_density,min_density_trunc\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.band);
    for (double v : {r.mu_l2, r.mu_linf, r.gradu_l2t, r.feedback_linf, r.value_abs, r.min_density,
                     r.min_density_trunc})
      out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string class_value_csv(const ErrorTable& table, const ExperimentConfig& ec) {
  std::string out = "N";
  for (std::size_t j = 0; j < table.class_value_errors.size(); ++j) out += ",sample_" + std::to_string(j);
  out += ",sup\n";
  for (std::size_t i = 0; i < ec.sweep.size(); ++i) {
    out += std::to_string(ec.sweep[i]);
    double sup = 0.0;
    for (const auto& row : table.class_value_errors) {
      out += "," + format_double(row[i]);
      sup = std::isnan(row[i]) || std::isnan(sup) ? kNaN : std::max(sup, row[i]);
    }
    out += "," + format_double(sup) + "\n";
  }
  return out;
}

std::string sweep_report_json(const ErrorTable& table) {
  json j;
  j["reference"] = json::parse(report_to_json(table.reference_report));
  j["reference_value"] = table.reference_value;
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row;
    row["N"] = r.band;
    row["failed"] = r.failed;
    if (r.failed) {
      row["message"] = r.message;
    } else {
      row["value"] = r.value;
    }
    rows.push_back(row);
  }
  j["points"] = rows;
  json slopes;
  for (const auto& [name, mf] : table.slopes) slopes[name] = fit_json(mf);
  j["slopes"] = slopes;
  j["class_value_slope"] = fit_json(table.class_value_slope);
  j["roundoff_floor"] = kRoundoffFloor;
  return j.dump(2) + "\n";
}

bool CheckReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed || c.skipped; });
}

std::string CheckReport::to_json() const {
  json j;
  j["all_passed"] = all_passed();
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back(json{{"name", c.name}, {"passed", c.passed}, {"skipped", c.skipped}, {"detail", c.detail}});
  j["checks"] = arr;
  json scan = json::array();
  for (const auto& [n, a, b] : positivity_scan) {
    json row;
    row["N"] = n;
    row["min_density"] = a;
    row["min_density_truncated"] = b;
    row["positive"] = a > 0.0 && b > 0.0;
    scan.push_back(row);
  }
  j["positivity_scan"] = scan;
  return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void run_check(CheckReport& rep, const std::string& name, const std::function<CheckResult()>& body) {
  CheckResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.name = name;
  rep.checks.push_back(r);
}

CheckResult verdict(bool passed, std::string detail) {
  CheckResult r;
  r.passed = passed;
  r.detail = std::move(detail);
  return r;
}

CheckResult skipped(std::string why) {
  CheckResult r;
  r.skipped = true;
  r.detail = std::move(why);
  return r;
}

}  // namespace

CheckReport run_checks(const ExperimentConfig& ec) {
  CheckReport rep;
  const ProblemConfig& cfg = ec.problem;
  const HamiltonianModel hm = make_hamiltonian(ec);
  const MfcCosts costs = make_costs(ec);
  const SpectralField m = make_initial(ec);
  const std::uint64_t seed = ec.seed;

  // Truncation bounds on seeded random fields, d in {1, 2}, band 16.
  run_check(rep, "truncation_lemmas", [&] {
    int violations = 0;
    double worst_l2 = 0.0, worst_sup = 0.0;
    const int ns[] = {2, 4, 8};
    const double qs[] = {2.0, 4.0};
    double tail[2][3][2];
    for (int d = 0; d < 2; ++d)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 2; ++b) tail[d][a][b] = tail_sum_constant(d + 1, qs[b], ns[a]);
    const int g = default_grid_size(16);
    for (int i = 0; i < 50; ++i) {
      const int dim = 1 + i % 2;
      const SpectralField f = random_smooth_field(dim, 16, 5.0, seed * 7919ull + static_cast<std::uint64_t>(i));
      for (int a = 0; a < 3; ++a) {
        const int n = ns[a];
        const SpectralField tr = dirichlet_truncate(f, n);
        const double l2 = l2_error(f, tr);
        const double linf = linf_error(f, tr, g);
        for (int b = 0; b < 2; ++b) {
          const double q = qs[b];
          if (sobolev_norm(tr, q) > sobolev_norm(f, q)) ++violations;
          const double a3 = l2 / (sobolev_norm(f, q) / std::pow(n, q));
          const double a4 = linf / (tail[dim - 1][a][b] * sobolev_norm(f, q) / std::pow(n, q - 0.5 * dim));
          worst_l2 = std::max(worst_l2, a3);
          worst_sup = std::max(worst_sup, a4);
          if (a3 > 1.0 || a4 > 1.0 + 1e-12) ++violations;
        }
      }
    }
    return verdict(violations == 0, "violations " + std::to_string(violations) + ", max L2 tail ratio " +
                                         fmt(worst_l2) + ", max sup tail ratio " + fmt(worst_sup));
  });

  std::optional<FBSolution> sol;
  run_check(rep, "fixed_point", [&] {
    sol = picard_solve(m, costs, hm, cfg, ec.picard);
    return verdict(true, std::to_string(sol->report.picard_iterations) + " iterations, residual " +
                             fmt(sol->report.final_residual));
  });

  run_check(rep, "mass_conservation", [&] {
    if (!sol) return skipped("no solution");
    double worst = 0.0;
    for (const auto& node : sol->forward.nodes) worst = std::max(worst, std::abs(node[node.zero_index()] - 1.0));
    return verdict(worst <= 1e-10, "max |mu(0) - 1| = " + fmt(worst));
  });

  run_check(rep, "hermitian_symmetry", [&] {
    if (!sol) return skipped("no solution");
    double worst = 0.0;
    for (const auto& node : sol->forward.nodes) worst = std::max(worst, node.hermitian_defect());
    for (const auto& node : sol->backward.nodes) worst = std::max(worst, node.hermitian_defect());
    return verdict(worst <= 1e-14, "max defect " + fmt(worst));
  });

  run_check(rep, "band_discipline", [&] {
    if (!sol) return skipped("no solution");
    const bool ok = sol->backward.band() == cfg.band &&
                    sol->forward.band() == cfg.effective_remainder_band();
    return verdict(ok, "backward band " + std::to_string(sol->backward.band()) + ", forward band " +
                           std::to_string(sol->forward.band()));
  });

  run_check(rep, "positivity", [&] {
    if (!sol) return skipped("no solution");
    const bool ok = sol->report.min_density > 0.0 && sol->report.min_density_truncated > 0.0;
    std::string detail = "min density " + fmt(sol->report.min_density) + ", truncated " +
                         fmt(sol->report.min_density_truncated);
    if (!ok) detail += " (N = " + std::to_string(cfg.band) + " is below the empirical positivity threshold)";
    return verdict(ok, detail);
  });

  for (int n = 1; n <= 8; ++n) {
    double a = kNaN, b = kNaN;
    try {
      const FBSolution s = picard_solve(m, costs, hm, at_band(cfg, n), ec.picard);
      a = s.report.min_density;
      b = s.report.min_density_truncated;
    } catch (const Error&) {
    }
    rep.positivity_scan.emplace_back(n, a, b);
  }

  run_check(rep, "duality_stability", [&] {
    double worst_ratio = 0.0, worst_rhs = 0.0;
    bool ok = true;
    for (int i = 0; i < 10; ++i) {
      const std::uint64_t base = seed * 104729ull + 2ull * static_cast<std::uint64_t>(i);
      const SpectralField m1 = sample_class_member(cfg.dim, cfg.smoothness, cfg.density_floor, ec.class_radius, base);
      const SpectralField m2 = sample_class_member(cfg.dim, cfg.smoothness, cfg.density_floor, ec.class_radius, base + 1);
      const FBSolution s1 = picard_solve(m1, costs, hm, cfg, ec.picard);
      const FBSolution s2 = picard_solve(m2, costs, hm, cfg, ec.picard);
      const DualityGap gap = duality_gap(s1, s2, cfg);
      ok = ok && gap.lhs <= 2.0 * hm.convexity_bound * 1.02 * gap.rhs && gap.rhs >= -1e-10;
      worst_ratio = std::max(worst_ratio, gap.ratio);
      worst_rhs = std::min(worst_rhs, gap.rhs);
    }
    return verdict(ok, "max lhs/rhs " + fmt(worst_ratio) + " (bound " + fmt(2.0 * hm.convexity_bound * 1.02) +
                           "), min rhs " + fmt(worst_rhs));
  });

  std::optional<FeedbackControl> alpha;
  double j_star = 0.0;
  run_check(rep, "optimality", [&] {
    if (!sol) return skipped("no solution");
    alpha = optimal_feedback(*sol, hm, cfg);
    j_star = cost_J_N(*alpha, 0, m, costs, hm, cfg).total;
    double worst_first = std::numeric_limits<double>::infinity();
    double worst_second = std::numeric_limits<double>::infinity();
    for (int b = 0; b < 10; ++b) {
      const SpectralField beta = random_direction(cfg.dim, cfg.band, seed * 31337ull + static_cast<std::uint64_t>(b));
      for (double eps : {1e-2, 1e-3}) {
        const double jp = cost_J_N(perturbed_feedback(*alpha, beta, eps, hm, cfg), 0, m, costs, hm, cfg).total;
        const double jm = cost_J_N(perturbed_feedback(*alpha, beta, -eps, hm, cfg), 0, m, costs, hm, cfg).total;
        worst_first = std::min({worst_first, jp - j_star, jm - j_star});
        worst_second = std::min(worst_second, (jp + jm - 2.0 * j_star) / (eps * eps));
      }
    }
    return verdict(worst_first >= -1e-8 && worst_second >= -1e-6,
                   "min J(a* + eps b) - J(a*) = " + fmt(worst_first) + ", min second difference " + fmt(worst_second));
  });

  run_check(rep, "legendre_consistency", [&] {
    if (!sol || !alpha) return skipped("no optimal feedback");
    const double d = legendre_defect(*sol, *alpha, hm);
    return verdict(d <= 1e-8, "max L + H + a.p = " + fmt(d));
  });

  run_check(rep, "admissibility", [&] {
    if (!alpha) return skipped("no optimal feedback");
    const AdmissibilityReport probe = admissibility_check(*alpha, std::numeric_limits<double>::infinity());
    const double c = 2.0 * *std::max_element(probe.weighted_sums.begin(), probe.weighted_sums.end());
    const AdmissibilityReport a = admissibility_check(*alpha, c);
    return verdict(a.ok, "C = " + fmt(c) + ", min margin " + fmt(*std::min_element(a.margins.begin(), a.margins.end())));
  });

  run_check(rep, "value_identification", [&] {
    const SpectralField tr = dirichlet_truncate(m, cfg.band);
    double worst = 0.0;
    for (int t : {0, cfg.steps / 2}) {
      const double v1 = value_V_N(t, m, costs, hm, cfg, ec.picard);
      const double v2 = value_V_N(t, tr, costs, hm, cfg, ec.picard);
      worst = std::max(worst, std::abs(v1 - v2));
    }
    return verdict(worst <= 1e-9, "max |V(t,m) - V(t,m*D^N)| = " + fmt(worst));
  });

  run_check(rep, "gamma_identification", [&] {
    if (!alpha) return skipped("no optimal feedback");
    const SpectralField z = dirichlet_truncate(m, cfg.band);
    double worst = std::abs(gamma_N_cost(*alpha, 0, z, costs, hm, cfg).total - j_star);
    const SpectralField beta = random_direction(cfg.dim, cfg.band, seed + 99);
    const FeedbackControl other = perturbed_feedback(*alpha, beta, 1e-2, hm, cfg);
    worst = std::max(worst, std::abs(gamma_N_cost(other, 0, z, costs, hm, cfg).total -
                                     cost_J_N(other, 0, m, costs, hm, cfg).total));
    return verdict(worst <= 1e-9, "max |Gamma - J| = " + fmt(worst));
  });

  run_check(rep, "cost_monotonicity", [&] {
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
      const std::uint64_t base = seed * 15485863ull + 2ull * static_cast<std::uint64_t>(i);
      const SpectralField a = sample_class_member(cfg.dim, cfg.smoothness, cfg.density_floor, ec.class_radius, base);
      const SpectralField b = sample_class_member(cfg.dim, cfg.smoothness, cfg.density_floor, ec.class_radius, base + 1);
      for (const CostModel* c : {&costs.running, &costs.terminal})
        if (!c->is_zero) worst = std::min(worst, monotonicity_bracket(*c, a, b));
    }
    if (!std::isfinite(worst)) return verdict(true, "zero costs");
    return verdict(worst >= -1e-10, "min bracket " + fmt(worst));
  });

  run_check(rep, "flat_derivative_consistency", [&] {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const std::uint64_t base = seed * 32452843ull + 2ull * static_cast<std::uint64_t>(i);
      const SpectralField a = sample_class_member(cfg.dim, cfg.smoothness, cfg.density_floor, ec.class_radius, base);
      const SpectralField b = sample_class_member(cfg.dim, cfg.smoothness, cfg.density_floor, ec.class_radius, base + 1);
      for (const CostModel* c : {&costs.running, &costs.terminal})
        if (!c->is_zero) worst = std::max(worst, std::abs(flat_derivative_defect(*c, a, b)));
    }
    return verdict(worst <= 1e-6, "max defect " + fmt(worst));
  });

  run_check(rep, "hamiltonian_convexity", [&] {
    const ConvexityProbe p = probe_convexity(hm, 200, seed);
    return verdict(p.within_bounds, "eigenvalues in [" + fmt(p.min_eigenvalue) + ", " + fmt(p.max_eigenvalue) +
                                        "], C_H = " + fmt(hm.convexity_bound));
  });

  run_check(rep, "oracle_agreement", [&] {
    if (cfg.dim != 1 || ec.hamiltonian.type != "quadratic")
      return skipped("dense oracle covers d = 1 with the quadratic Hamiltonian only");
    oracle::DenseProblem pb;
    pb.band = 2;
    pb.remainder_band = 6;
    pb.horizon = 0.1;
    pb.steps = 4096;
    pb.costs = costs;
    pb.cutoff = hm.cutoff;
    pb.init_truncated = cfg.init_truncated;
    const oracle::DenseSolution dense = oracle::solve(m, pb);
    ProblemConfig small = cfg;
    small.band = 2;
    small.remainder_band = 6;
    small.horizon = 0.1;
    small.grid = 0;
    PicardOptions tight = ec.picard;
    tight.tol = 1e-14;
    const auto max_error = [&](int steps) {
      small.steps = steps;
      const FBSolution s = picard_solve(m, costs, hm, small, tight);
      const int stride = pb.steps / steps;
      double e = 0.0;
      for (int i = 0; i <= steps; ++i) {
        const SpectralField df = s.forward.nodes[i] - dense.forward.nodes[i * stride];
        const SpectralField du = s.backward.nodes[i] - dense.backward.nodes[i * stride];
        for (const auto& c : df.coeffs()) e = std::max(e, std::abs(c));
        for (const auto& c : du.coeffs()) e = std::max(e, std::abs(c));
      }
      return e;
    };
    const double e256 = max_error(256);
    std::vector<std::pair<double, double>> pts;
    for (int steps : {32, 64, 128}) pts.emplace_back(1.0 / steps, max_error(steps));
    const double order = fit_rate(pts).slope;
    return verdict(e256 <= 1e-6 && order >= 1.7 && order <= 2.3,
                   "max coefficient error at S = 256: " + fmt(e256) + ", observed order " + fmt(order));
  });

  return rep;
}

FBSolution solve_config(const ExperimentConfig& ec) {
  return picard_solve(make_initial(ec), make_costs(ec), make_hamiltonian(ec), ec.problem, ec.picard);
}

void write_solution(const ExperimentConfig& ec, const FBSolution& sol, const std::string& dir) {
  std::error_code err;
  fs::create_directories(dir, err);
  if (err) throw IoError("cannot create directory '" + dir + "': " + err.message());
  const std::string hash = fnv1a_hex(ec.canonical_json);
  write_text((fs::path(dir) / "config.json").string(), ec.canonical_json);
  write_text((fs::path(dir) / "report.json").string(), report_to_json(sol.report) + "\n");
  write_path((fs::path(dir) / "forward").string(), sol.forward, hash);
  write_path((fs::path(dir) / "backward").string(), sol.backward, hash);
}

}  // namespace fgmfc
