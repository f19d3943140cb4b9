// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fgmfc/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fgmfc/error.hpp"

namespace fgmfc {

namespace {

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

// Solves A y = b for a small dense SPD matrix (row-major) by Cholesky; falls back
// to the identity solve when A is not numerically positive definite.
std::vector<double> solve_spd(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      a.data(), n, n);
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  std::vector<double> y(b.size());
  Eigen::Map<Eigen::VectorXd> out(y.data(), n);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive())
    out = ldlt.solve(rhs);
  else
    out = rhs;
  return y;
}

// Smallest s in [0, s_max] with |D_p H(x, s u)| >= M, for unit direction u.
double crossing_radius(const HamiltonianModel& hm, PointRef x, std::span<const double> u,
                       double s_max) {
  const auto d = u.size();
  std::vector<double> p(d), g(d);
  auto grad_norm = [&](double s) {
    for (std::size_t i = 0; i < d; ++i) p[i] = s * u[i];
    hm.gradient(x, p, g);
    return norm2(g);
  };
  if (grad_norm(0.0) >= hm.cutoff) return 0.0;
  double lo = 0.0, hi = s_max;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + s_max); ++it) {
    const double mid = 0.5 * (lo + hi);
    (grad_norm(mid) >= hm.cutoff ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

HamiltonianModel quadratic_hamiltonian(int dim, double convexity_bound, double cutoff) {
  HamiltonianModel hm;
  hm.name = "quadratic";
  hm.dim = dim;
  hm.convexity_bound = convexity_bound;
  hm.cutoff = cutoff;
  hm.value = [](PointRef, PointRef p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return 0.5 * s;
  };
  hm.gradient = [](PointRef, PointRef p, std::span<double> out) {
    std::copy(p.begin(), p.end(), out.begin());
  };
  hm.hessian = [](PointRef, PointRef p, std::span<double> out) {
    const auto d = p.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) out[i * d + i] = 1.0;
  };
  hm.lagrangian = [](PointRef, PointRef a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return 0.5 * s;
  };
  return hm;
}

std::vector<double> quadratic_drift_field(PointRef x, double amplitude) {
  std::vector<double> nu(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) nu[i] = amplitude * std::sin(kTwoPi * x[i]);
  return nu;
}

HamiltonianModel quadratic_drift_hamiltonian(int dim, double amplitude, double convexity_bound,
                                             double cutoff) {
  HamiltonianModel hm = quadratic_hamiltonian(dim, convexity_bound, cutoff);
  hm.name = "quadratic_drift";
  hm.value = [amplitude](PointRef x, PointRef p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      s += 0.5 * p[i] * p[i] + amplitude * std::sin(kTwoPi * x[i]) * p[i];
    return s;
  };
  hm.gradient = [amplitude](PointRef x, PointRef p, std::span<double> out) {
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] + amplitude * std::sin(kTwoPi * x[i]);
  };
  hm.lagrangian = [amplitude](PointRef x, PointRef a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = a[i] + amplitude * std::sin(kTwoPi * x[i]);
      s += v * v;
    }
    return 0.5 * s;
  };
  return hm;
}

HamiltonianModel cutoff_hamiltonian(const HamiltonianModel& hm) {
  if (!(hm.cutoff > 0.0)) throw InvalidArgument("cutoff level M must be positive");
  HamiltonianModel out = hm;
  out.name = hm.name + "+cutoff";
  const double m = hm.cutoff;
  // Work on the raw model even if `hm` is already a cutoff model.
  const HamiltonianModel raw = hm;

  out.saturated = [raw, m](PointRef x, PointRef p) {
    std::vector<double> g(p.size());
    raw.gradient(x, p, g);
    return norm2(g) > m;
  };
  out.gradient = [raw, m](PointRef x, PointRef p, std::span<double> o) {
    raw.gradient(x, p, o);
    const double n = norm2(o);
    if (n > m)
      for (double& v : o) v *= m / n;
  };
  out.value = [raw, m](PointRef x, PointRef p) {
    const auto d = p.size();
    std::vector<double> g(d);
    raw.gradient(x, p, g);
    if (norm2(g) <= m) return raw.value(x, p);
    const double r = norm2(p);
    std::vector<double> u(d);
    for (std::size_t i = 0; i < d; ++i) u[i] = p[i] / r;
    const double s0 = crossing_radius(raw, x, u, r);
    std::vector<double> q(d);
    for (std::size_t i = 0; i < d; ++i) q[i] = s0 * u[i];
    const double base = raw.value(x, q);
    auto radial = [&](double s) {
      for (std::size_t i = 0; i < d; ++i) q[i] = s * u[i];
      raw.gradient(x, q, g);
      const double n = norm2(g);
      const double scale = n > m ? m / n : 1.0;
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += scale * g[i] * u[i];
      return dot;
    };
    return base + boost::math::quadrature::gauss<double, 10>::integrate(radial, s0, r);
  };
  // The clamped gradient is not differentiable in closed form.
  out.hessian = nullptr;
  return out;
}

std::vector<double> hamiltonian_hessian(const HamiltonianModel& hm, PointRef x, PointRef p) {
  const auto d = p.size();
  std::vector<double> h(d * d);
  if (hm.hessian) {
    hm.hessian(x, p, h);
    return h;
  }
  std::vector<double> pp(p.begin(), p.end()), gp(d), gm(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double step = 1e-5 * (1.0 + std::abs(p[j]));
    pp[j] = p[j] + step;
    hm.gradient(x, pp, gp);
    pp[j] = p[j] - step;
    hm.gradient(x, pp, gm);
    pp[j] = p[j];
    for (std::size_t i = 0; i < d; ++i) h[i * d + j] = (gp[i] - gm[i]) / (2.0 * step);
  }
  // Symmetrize.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double s = 0.5 * (h[i * d + j] + h[j * d + i]);
      h[i * d + j] = h[j * d + i] = s;
    }
  return h;
}

double numeric_legendre_lagrangian(const HamiltonianModel& hm, PointRef x, PointRef a) {
  const auto d = a.size();
  std::vector<double> p(d, 0.0), g(d), r(d), trial(d);
  auto objective = [&](std::span<const double> q) {
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += a[i] * q[i];
    return -dot - hm.value(x, q);
  };
  double residual = 0.0;
  for (int it = 0; it < 100; ++it) {
    hm.gradient(x, p, g);
    for (std::size_t i = 0; i < d; ++i) r[i] = g[i] + a[i];
    residual = norm2(r);
    if (residual <= 1e-10) return objective(p);
    const auto step = solve_spd(hamiltonian_hessian(hm, x, p), r);
    // Backtracking on the strongly concave objective.
    const double f0 = objective(p);
    double t = 1.0;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < d; ++i) trial[i] = p[i] - t * step[i];
      if (objective(trial) >= f0 - 1e-14 * (1.0 + std::abs(f0))) break;
    }
    p = trial;
  }
  hm.gradient(x, p, g);
  for (std::size_t i = 0; i < d; ++i) r[i] = g[i] + a[i];
  residual = norm2(r);
  if (residual <= 1e-10) return objective(p);
  std::ostringstream os;
  os << "Legendre transform: Newton did not converge in 100 iterations (|D_pH + a| = "
     << residual << ")";
  throw NumericFailure(os.str());
}

double legendre_lagrangian(const HamiltonianModel& hm, PointRef x, PointRef a) {
  if (hm.lagrangian) return hm.lagrangian(x, a);
  return numeric_legendre_lagrangian(hm, x, a);
}

ConvexityProbe probe_convexity(const HamiltonianModel& hm, int samples, std::uint64_t seed,
                               double p_range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> mom(-p_range, p_range);
  const auto d = static_cast<std::size_t>(hm.dim);
  std::vector<double> x(d), p(d);
  ConvexityProbe probe;
  probe.min_eigenvalue = std::numeric_limits<double>::infinity();
  probe.max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    for (auto& v : x) v = unit(rng);
    for (auto& v : p) v = mom(rng);
    // Always difference the gradient: the probe checks the model, not its
    // closed-form Hessian.
    HamiltonianModel fd = hm;
    fd.hessian = nullptr;
    const auto h = hamiltonian_hessian(fd, x, p);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        h.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    probe.min_eigenvalue = std::min(probe.min_eigenvalue, es.eigenvalues().minCoeff());
    probe.max_eigenvalue = std::max(probe.max_eigenvalue, es.eigenvalues().maxCoeff());
  }
  const double c = hm.convexity_bound;
  probe.within_bounds =
      probe.min_eigenvalue >= 1.0 / c - 1e-4 && probe.max_eigenvalue <= c + 1e-4;
  return probe;
}

CostModel zero_cost(int dim) {
  CostModel cm;
  cm.name = "zero";
  cm.value = [](const SpectralField&) { return 0.0; };
  cm.flat_derivative = [dim](const SpectralField&) { return SpectralField(dim, 0); };
  cm.lipschitz = 0.0;
  cm.smoothness = std::numeric_limits<int>::max();
  cm.is_zero = true;
  return cm;
}

CylindricalPhi phi_linear(std::vector<double> weights) {
  CylindricalPhi phi;
  phi.curvature.assign(weights.size(), 0.0);
  phi.value = [weights](std::span<const double> v) {
    return std::inner_product(weights.begin(), weights.end(), v.begin(), 0.0);
  };
  phi.gradient = [weights](std::span<const double>, std::span<double> out) {
    std::copy(weights.begin(), weights.end(), out.begin());
  };
  return phi;
}

CylindricalPhi phi_quadratic(std::vector<double> weights) {
  CylindricalPhi phi;
  for (double w : weights) phi.curvature.push_back(2.0 * std::abs(w));
  phi.value = [weights](std::span<const double> v) {
    double s = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * v[j] * v[j];
    return s;
  };
  phi.gradient = [weights](std::span<const double> v, std::span<double> out) {
    for (std::size_t j = 0; j < weights.size(); ++j) out[j] = 2.0 * weights[j] * v[j];
  };
  return phi;
}

CostModel builtin_cost_cylindrical(CylindricalPhi phi, std::vector<SpectralField> psis) {
  if (psis.empty()) throw InvalidArgument("cylindrical cost needs at least one test function");
  const int dim = psis.front().dim();
  int band = 0;
  for (const auto& psi : psis) {
    if (psi.dim() != dim) throw InvalidArgument("cylindrical test functions differ in dimension");
    band = std::max(band, psi.band());
  }
  if (phi.curvature.size() != psis.size())
    throw InvalidArgument("phi arity does not match the number of test functions");

  CostModel cm;
  cm.name = "cylindrical";
  double lip = 0.0;
  for (std::size_t j = 0; j < psis.size(); ++j) {
    double wiener = 0.0;
    for (const auto& c : psis[j].coeffs()) wiener += std::abs(c);
    lip += phi.curvature[j] * sobolev_norm(psis[j], 0.0) * wiener;
  }
  cm.lipschitz = lip;
  cm.smoothness = std::numeric_limits<int>::max();  // band-limited test functions

  auto brackets = [psis](const SpectralField& mu) {
    std::vector<double> v(psis.size());
    for (std::size_t j = 0; j < psis.size(); ++j) v[j] = pairing(mu, psis[j]);
    return v;
  };
  cm.value = [phi, brackets](const SpectralField& mu) { return phi.value(brackets(mu)); };
  cm.flat_derivative = [phi, brackets, psis, dim, band](const SpectralField& mu) {
    const auto v = brackets(mu);
    std::vector<double> g(v.size());
    phi.gradient(v, g);
    SpectralField out(dim, band);
    for (std::size_t j = 0; j < psis.size(); ++j) {
      SpectralField term = psis[j].with_band(band);
      term *= g[j];
      out += term;
    }
    return out;
  };
  return cm;
}

CostModel builtin_cost_negative_sobolev(const SpectralField& mu0, int r, double weight,
                                        std::vector<std::string>* warnings) {
  const int dim = mu0.dim();
  if (r < dim + 2 && warnings != nullptr) {
    std::ostringstream os;
    os << "neg_sobolev: r = " << r << " < d + 2 = " << dim + 2
       << "; derivative smoothness q = 2r - d - 1 = " << 2 * r - dim - 1 << " < d + 3";
    warnings->push_back(os.str());
  }
  CostModel cm;
  cm.name = "neg_sobolev";
  cm.smoothness = 2 * r - dim - 1;
  // 2 (sum_k (1 + |k|^2)^{-2r})^{1/2}, summed over shells of equal band norm.
  double s = 1.0;
  for (int n = 1; n < 100000; ++n) {
    const double shell = std::pow(2.0 * n + 1.0, dim) - std::pow(2.0 * n - 1.0, dim);
    const double term = shell * std::pow(1.0 + static_cast<double>(n) * n, -2.0 * r);
    s += term;
    if (term < 1e-18 * s) break;
  }
  cm.lipschitz = 2.0 * weight * std::sqrt(s);

  auto weighted_diff = [mu0, r](const SpectralField& mu) {
    const int band = std::max(mu.band(), mu0.band());
    SpectralField diff = mu.with_band(band) - mu0.with_band(band);
    for (std::size_t i = 0; i < diff.size(); ++i) {
      const double kn = diff.mode_norm(i);
      diff[i] /= std::pow(1.0 + kn * kn, r);
    }
    return diff;
  };
  cm.value = [mu0, weighted_diff, weight](const SpectralField& mu) {
    const int band = std::max(mu.band(), mu0.band());
    const SpectralField diff = mu.with_band(band) - mu0.with_band(band);
    const SpectralField wd = weighted_diff(mu);
    double v = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) v += (diff[i] * std::conj(wd[i])).real();
    return weight * v;
  };
  cm.flat_derivative = [weighted_diff, weight](const SpectralField& mu) {
    // 2 Re[sum_k c_k e_k] has coefficients c_k + conj(c_{-k}).
    SpectralField wd = weighted_diff(mu);
    SpectralField out = wd;
    for (std::size_t i = 0; i < wd.size(); ++i)
      out[i] = weight * (wd[i] + std::conj(wd[wd.mirror_index(i)]));
    return out;
  };
  return cm;
}

double monotonicity_bracket(const CostModel& cm, const SpectralField& mu,
                            const SpectralField& mu_prime) {
  const SpectralField a = cm.flat_derivative(mu);
  const SpectralField b = cm.flat_derivative(mu_prime);
  const int band = std::max({a.band(), b.band(), mu.band(), mu_prime.band()});
  return pairing(a.with_band(band) - b.with_band(band),
                 mu.with_band(band) - mu_prime.with_band(band));
}

double flat_derivative_defect(const CostModel& cm, const SpectralField& mu,
                              const SpectralField& nu) {
  const int band = std::max(mu.band(), nu.band());
  const SpectralField m = mu.with_band(band);
  const SpectralField n = nu.with_band(band);
  const SpectralField diff = m - n;
  auto integrand = [&](double t) {
    SpectralField mix = t * m + (1.0 - t) * n;
    return pairing(cm.flat_derivative(mix), diff);
  };
  const double integral = boost::math::quadrature::gauss<double, 16>::integrate(integrand, 0.0, 1.0);
  return cm.value(mu) - cm.value(nu) - integral;
}

int ProblemConfig::grid_resolution() const {
  if (grid > 0) return grid;
  return fft_friendly_size(std::max(4 * band + 1, 2 * effective_remainder_band() + 1));
}

std::vector<std::string> ProblemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (dim < 1) fail("dim must be >= 1");
  if (!(horizon > 0.0)) fail("horizon T must be positive");
  if (band < 1) fail("band N must be >= 1");
  if (steps < 1) fail("steps S must be >= 1");
  if (!(density_floor > 0.0 && density_floor < 1.0)) fail("gamma must lie in (0, 1)");
  if (remainder_band != 0 && remainder_band < band) fail("remainder_band K_max must be >= N");
  if (grid != 0) {
    const int need = std::max(4 * band + 1, 2 * effective_remainder_band() + 1);
    if (grid < need) {
      std::ostringstream os;
      os << "grid " << grid << " too small: need >= " << need << " for N = " << band
         << ", K_max = " << effective_remainder_band();
      fail(os.str());
    }
  }
  std::vector<std::string> warnings;
  if (smoothness < dim + 3) {
    std::ostringstream os;
    os << "q = " << smoothness << " is below d + 3 = " << dim + 3
       << "; convergence rates are not covered";
    warnings.push_back(os.str());
  }
  return warnings;
}

}  // namespace fgmfc
