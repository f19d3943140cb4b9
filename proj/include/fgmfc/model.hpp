// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgmfc/spectral.hpp"

namespace fgmfc {

using PointRef = std::span<const double>;

/// Hamiltonian H(x, p) on T^d x R^d, strongly convex in p.
///
/// `value` and `gradient` are mandatory. `hessian` (row-major d x d) and
/// `lagrangian` are optional closed forms; without them the Hessian is
/// obtained by central differences of `gradient` and the Lagrangian by a
/// numerical Legendre transform.
struct HamiltonianModel {
  std::string name;
  int dim = 1;
  std::function<double(PointRef x, PointRef p)> value;
  std::function<void(PointRef x, PointRef p, std::span<double> out)> gradient;
  std::function<void(PointRef x, PointRef p, std::span<double> out)> hessian;
  std::function<double(PointRef x, PointRef a)> lagrangian;
  /// True where a cutoff replaced the gradient by its clamp; empty for raw models.
  std::function<bool(PointRef x, PointRef p)> saturated;
  /// C_H in (1/C_H) I <= D2_pp H <= C_H I.
  double convexity_bound = 1.0;
  /// Bound M on |D_p H| enforced by the cutoff.
  double cutoff = 50.0;

  bool is_cutoff() const { return static_cast<bool>(saturated); }
};

/// H(x,p) = |p|^2 / 2.
HamiltonianModel quadratic_hamiltonian(int dim, double convexity_bound = 1.25,
                                       double cutoff = 50.0);

/// H(x,p) = |p|^2 / 2 + nu(x).p with nu_i(x) = amplitude * sin(2 pi x_i).
HamiltonianModel quadratic_drift_hamiltonian(int dim, double amplitude,
                                             double convexity_bound = 1.25,
                                             double cutoff = 50.0);

/// Drift field nu(x) of quadratic_drift_hamiltonian, evaluated at x.
std::vector<double> quadratic_drift_field(PointRef x, double amplitude);

/// Globally Lipschitz modification of H.
///
/// Where |D_p H(x,p)| <= M nothing changes. Beyond, D_p H is clamped radially
/// to norm M and the value is continued along the ray s -> s p/|p| from the
/// crossing point s0 where |D_p H| reaches M:
///   H~(x,p) = H(x, s0 p/|p|) + int_{s0}^{|p|} clamp(D_p H)(x, s p/|p|).p/|p| ds.
HamiltonianModel cutoff_hamiltonian(const HamiltonianModel& hm);

/// D2_pp H at (x, p), analytic when available, else central differences.
std::vector<double> hamiltonian_hessian(const HamiltonianModel& hm, PointRef x, PointRef p);

/// L(x,a) = sup_p ( -a.p - H(x,p) ).
///
/// Uses the closed form when the model has one, otherwise Newton iteration on
/// D_p H(x,p) = -a (tolerance 1e-10, at most 100 iterations, NumericFailure
/// beyond that).
double legendre_lagrangian(const HamiltonianModel& hm, PointRef x, PointRef a);

/// Same transform, always computed numerically (ignores any closed form).
double numeric_legendre_lagrangian(const HamiltonianModel& hm, PointRef x, PointRef a);

struct ConvexityProbe {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool within_bounds = false;  // both inside [1/C_H - 1e-4, C_H + 1e-4]
};

/// Finite-difference Hessian eigenvalues at `samples` seeded random points with
/// |p_i| <= p_range.
ConvexityProbe probe_convexity(const HamiltonianModel& hm, int samples, std::uint64_t seed,
                               double p_range = 5.0);

/// Mean-field cost functional mu -> F(mu) with its flat derivative.
///
/// `flat_derivative` returns the Fourier coefficients of x -> dF/dmu(mu, x).
/// Additive constants of the derivative are left as produced.
struct CostModel {
  std::string name;
  std::function<double(const SpectralField& mu)> value;
  std::function<SpectralField(const SpectralField& mu)> flat_derivative;
  /// Lipschitz constant of mu -> dF/dmu(mu, .) from L2 into sup norm.
  double lipschitz = 0.0;
  /// Smoothness order q of the derivative in x.
  int smoothness = 0;
  /// True for the identically-zero cost; lets the solver skip evaluation.
  bool is_zero = false;
};

CostModel zero_cost(int dim);

/// Outer function phi: R^k -> R of a cylindrical cost.
struct CylindricalPhi {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  /// Lipschitz constant of d_j phi in v_j, per component (phi is separable);
  /// used to report L_F.
  std::vector<double> curvature;
};

/// phi(v) = sum_j w_j v_j.
CylindricalPhi phi_linear(std::vector<double> weights);
/// phi(v) = sum_j w_j v_j^2 (concave for negative weights).
CylindricalPhi phi_quadratic(std::vector<double> weights);

/// F(mu) = phi(<mu, psi_1>, ..., <mu, psi_k>), dF/dmu(mu, x) = sum_j d_j phi(...) psi_j(x).
CostModel builtin_cost_cylindrical(CylindricalPhi phi, std::vector<SpectralField> psis);

/// Phi(mu) = sum_k |mu(k) - mu0(k)|^2 / (1 + |k|^2)^r over the stored bands, with
/// dPhi/dmu(mu, x) = 2 sum_k Re[(mu(k) - mu0(k)) / (1 + |k|^2)^r e_k(x)].
/// `weight` scales both. Warns (through `warnings`) when r < d + 2.
CostModel builtin_cost_negative_sobolev(const SpectralField& mu0, int r, double weight = 1.0,
                                        std::vector<std::string>* warnings = nullptr);

/// <dF(mu) - dF(mu'), mu - mu'>; non-negative for convex F.
double monotonicity_bracket(const CostModel& cm, const SpectralField& mu,
                            const SpectralField& mu_prime);

/// Difference F(mu) - F(nu) - int_0^1 <dF(t mu + (1-t) nu), mu - nu> dt, with the
/// time integral done by 16-point Gauss-Legendre.
double flat_derivative_defect(const CostModel& cm, const SpectralField& mu,
                              const SpectralField& nu);

/// Problem data shared by all solver stages.
struct ProblemConfig {
  int dim = 1;
  double horizon = 1.0;  // T
  int band = 8;          // N
  int smoothness = 4;    // q
  double density_floor = 0.5;  // gamma
  int grid = 0;          // G; 0 selects default
  int steps = 256;       // S
  int remainder_band = 0;  // K_max; 0 selects 4N
  bool init_truncated = false;

  double dt() const { return horizon / steps; }
  int effective_remainder_band() const { return remainder_band > 0 ? remainder_band : 4 * band; }
  /// Pseudo-spectral resolution: the configured G, or the smallest FFT-friendly
  /// size >= max(4N+1, 2 K_max + 1).
  int grid_resolution() const;
  /// Throws ConfigError on invalid values; returns non-fatal warnings.
  std::vector<std::string> validate() const;
};

}  // namespace fgmfc
