// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fgmfc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fgmfc::oracle {

namespace {

using Coeffs = std::vector<Complex>;

void require_problem(const DenseProblem& pb) {
  if (pb.band < 1 || pb.remainder_band < pb.band)
    throw InvalidArgument("oracle: need 1 <= N <= K_max");
  if (pb.steps < 3 || !(pb.horizon > 0.0)) throw InvalidArgument("oracle: need S >= 3 and T > 0");
}

Coeffs to_coeffs(const SpectralField& f, int band) {
  if (f.dim() != 1) throw InvalidArgument("oracle: only d = 1 is supported");
  const SpectralField g = f.with_band(band);
  return Coeffs(g.coeffs().begin(), g.coeffs().end());
}

SpectralField to_field(const Coeffs& c, int band) {
  return SpectralField::from_coeffs(1, band, c).symmetrize();
}

template <class Rhs>
Coeffs rk4_step(const Coeffs& y, double t, double h, Rhs&& rhs) {
  const auto axpy = [](const Coeffs& a, const Coeffs& b, double s) {
    Coeffs out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  const Coeffs k1 = rhs(t, y);
  const Coeffs k2 = rhs(t + 0.5 * h, axpy(y, k1, 0.5 * h));
  const Coeffs k3 = rhs(t + 0.5 * h, axpy(y, k2, 0.5 * h));
  const Coeffs k4 = rhs(t + h, axpy(y, k3, h));
  Coeffs out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

double rate(int k) { return kTwoPi * kTwoPi * k * k; }

}  // namespace

PathFunction interpolate(const CoefficientPath& path) {
  if (path.nodes.size() < 4) throw InvalidArgument("oracle: interpolation needs >= 4 nodes");
  return [path](double t) {
    const int last = path.steps;
    const double h = path.horizon / path.steps;
    const double x = std::clamp(t / h, 0.0, static_cast<double>(last));
    const int j = std::clamp(static_cast<int>(std::floor(x)), 1, last - 2);
    const double s = x - j;
    // Lagrange weights on nodes j-1, j, j+1, j+2.
    const double w[4] = {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
                         -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
    SpectralField out(path.dim(), path.band());
    for (int i = 0; i < 4; ++i) {
      const SpectralField& node = path.nodes[static_cast<std::size_t>(j - 1 + i)];
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += w[i] * node[c];
    }
    return out;
  };
}

CoefficientPath backward(const PathFunction& nu, const DenseProblem& pb) {
  require_problem(pb);
  const int n = pb.band;
  const double h = pb.horizon / pb.steps;
  const auto derivative = [&](const CostModel& cm, double t) {
    if (cm.is_zero) return Coeffs(static_cast<std::size_t>(2 * n + 1));
    return to_coeffs(cm.flat_derivative(nu(t)), n);
  };
  // U(tau) = u(T - tau); dU/dtau = -|2 pi k|^2 U + dF(nu) - H(U_x)^, where
  // H(U_x)^(k) = -2 pi^2 sum_l l (k - l) U(l) U(k - l).
  const auto rhs = [&](double tau, const Coeffs& y) {
    double slope = 0.0;
    for (int l = -n; l <= n; ++l) slope += kTwoPi * std::abs(l) * std::abs(y[l + n]);
    if (slope > pb.cutoff) throw NumericFailure("oracle: |u_x| reached the cutoff level");
    Coeffs out = derivative(pb.costs.running, pb.horizon - tau);
    for (int k = -n; k <= n; ++k) {
      Complex conv = 0.0;
      for (int l = std::max(-n, k - n); l <= std::min(n, k + n); ++l)
        conv += static_cast<double>(l) * (k - l) * y[l + n] * y[k - l + n];
      out[k + n] += -rate(k) * y[k + n] + 2.0 * kPi * kPi * conv;
    }
    return out;
  };

  CoefficientPath out;
  out.horizon = pb.horizon;
  out.steps = pb.steps;
  out.role = PathRole::kBackward;
  out.nodes.resize(static_cast<std::size_t>(pb.steps + 1));
  Coeffs y = derivative(pb.costs.terminal, pb.horizon);
  out.nodes[pb.steps] = to_field(y, n);
  for (int step = 0; step < pb.steps; ++step) {
    y = rk4_step(y, step * h, h, rhs);
    out.nodes[pb.steps - step - 1] = to_field(y, n);
  }
  return out;
}

CoefficientPath forward(const PathFunction& u, const SpectralField& m, const DenseProblem& pb) {
  require_problem(pb);
  const int n = pb.band;
  const int kmax = pb.remainder_band;
  const double h = pb.horizon / pb.steps;
  // d mu(k)/dt = -|2 pi k|^2 mu(k) - 4 pi^2 k sum_{|j|, |k-j| <= N} j u(j) mu(k - j).
  const auto rhs = [&](double t, const Coeffs& y) {
    const Coeffs uc = to_coeffs(u(t), n);
    Coeffs out(y.size());
    for (int k = -kmax; k <= kmax; ++k) {
      Complex conv = 0.0;
      for (int j = std::max(-n, k - n); j <= std::min(n, k + n); ++j)
        conv += static_cast<double>(j) * uc[j + n] * y[k - j + kmax];
      out[k + kmax] = -rate(k) * y[k + kmax] - 4.0 * kPi * kPi * k * conv;
    }
    return out;
  };

  Coeffs y = to_coeffs(m, kmax);
  if (pb.init_truncated)
    for (int k = -kmax; k <= kmax; ++k)
      if (std::abs(k) > n) y[k + kmax] = 0.0;
  CoefficientPath out;
  out.horizon = pb.horizon;
  out.steps = pb.steps;
  out.role = PathRole::kForward;
  out.nodes.push_back(to_field(y, kmax));
  for (int step = 0; step < pb.steps; ++step) {
    y = rk4_step(y, step * h, h, rhs);
    out.nodes.push_back(to_field(y, kmax));
  }
  return out;
}

DenseSolution solve(const SpectralField& m, const DenseProblem& pb, double tol, int max_iter) {
  require_problem(pb);
  const int n = pb.band;
  const double h = pb.horizon / pb.steps;
  CoefficientPath nu;
  nu.horizon = pb.horizon;
  nu.steps = pb.steps;
  nu.role = PathRole::kFlow;
  const SpectralField start = dirichlet_truncate(m, n).with_band(n);
  for (int s = 0; s <= pb.steps; ++s) {
    SpectralField node = start;
    for (int k = -n; k <= n; ++k) node.set({k}, node.at({k}) * std::exp(-rate(k) * s * h));
    nu.nodes.push_back(std::move(node));
  }

  DenseSolution out;
  for (int it = 1; it <= max_iter; ++it) {
    out.backward = backward(interpolate(nu), pb);
    out.forward = forward(interpolate(out.backward), m, pb);
    double residual = 0.0;
    for (int s = 0; s <= pb.steps; ++s) {
      SpectralField next = dirichlet_truncate(out.forward.nodes[s], n).with_band(n);
      residual = std::max(residual, l2_error(next, nu.nodes[s]));
      nu.nodes[s] = std::move(next);
    }
    out.iterations = it;
    out.residual = residual;
    if (residual <= tol) return out;
  }
  std::ostringstream os;
  os << "oracle: Picard iteration stalled at residual " << out.residual;
  throw NumericFailure(os.str());
}

}  // namespace fgmfc::oracle
