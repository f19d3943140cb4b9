// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fgmfc {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Integer wave vector k in Z^d. Its band norm is max_i |k_i|.
struct ModeIndex {
  std::vector<int> components;

  int dim() const { return static_cast<int>(components.size()); }
  int norm() const;
  ModeIndex negated() const;
  bool operator==(const ModeIndex&) const = default;
};

/// Fourier coefficients of a real function (or measure density) on the torus,
/// restricted to the cube |k| <= band.
///
/// Coefficients are stored densely over the cube {k : max_i |k_i| <= band} in
/// lexicographic order of (k_1, ..., k_d), each k_i running from -band to band,
/// with k_1 varying slowest. Two fields with equal (dim, band) share the same
/// layout, so the flat index of a mode can be reused across fields.
class SpectralField {
 public:
  SpectralField() : SpectralField(1, 0) {}
  SpectralField(int dim, int band);

  static SpectralField from_coeffs(int dim, int band, std::vector<Complex> coeffs);
  static SpectralField constant(int dim, double value);

  int dim() const { return dim_; }
  int band() const { return band_; }
  int side() const { return 2 * band_ + 1; }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }

  /// Coefficient of mode k; zero when k lies outside the stored band.
  Complex at(std::span<const int> k) const;
  Complex at(const ModeIndex& k) const { return at(k.components); }
  Complex at(std::initializer_list<int> k) const;
  void set(std::span<const int> k, Complex value);
  void set(std::initializer_list<int> k, Complex value);

  Complex& operator[](std::size_t flat) { return coeffs_[flat]; }
  const Complex& operator[](std::size_t flat) const { return coeffs_[flat]; }

  std::size_t index_of(std::span<const int> k) const;
  ModeIndex mode_at(std::size_t flat) const;
  int mode_norm(std::size_t flat) const;
  /// Flat index of -k for the mode stored at `flat`.
  std::size_t mirror_index(std::size_t flat) const { return coeffs_.size() - 1 - flat; }
  std::size_t zero_index() const { return coeffs_.size() / 2; }

  /// max_k |c(-k) - conj(c(k))|.
  double hermitian_defect() const;
  /// Replaces c(k) by (c(k) + conj(c(-k))) / 2.
  SpectralField& symmetrize();

  /// Same field re-banded: modes above `band` are dropped, new modes are zero.
  SpectralField with_band(int band) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  SpectralField& operator*=(Complex s);

  bool same_layout(const SpectralField& other) const {
    return dim_ == other.dim_ && band_ == other.band_;
  }

  bool operator==(const SpectralField&) const = default;

 private:
  int dim_;
  int band_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Real values of a function sampled on the uniform grid x_j = j / resolution,
/// stored in lexicographic order with the first axis slowest.
struct GridField {
  int dim = 1;
  int resolution = 1;
  std::vector<double> values;
  /// Largest imaginary part discarded when the grid was synthesised.
  double imag_residue = 0.0;

  std::size_t size() const { return values.size(); }
  /// Coordinate along each axis of the grid point with flat index `flat`.
  std::vector<double> point(std::size_t flat) const;
};

/// Number of points of a d-dimensional grid with `resolution` points per axis.
std::size_t grid_point_count(int dim, int resolution);

/// Smallest n' >= n of the form 2^a 3^b 5^c.
int fft_friendly_size(int n);

/// Default pseudo-spectral resolution for a band-K field: 4K+1 rounded up to an
/// FFT-friendly size, enough to resolve quadratic products without aliasing.
int default_grid_size(int band);

/// Keeps the modes |k| <= N. Throws InvalidArgument for negative N.
SpectralField dirichlet_truncate(const SpectralField& f, int n);

/// sqrt( sum_k (1 + |k|^2)^q |c(k)|^2 ) over the stored band.
double sobolev_norm(const SpectralField& f, double q);

/// Spectral gradient: component i has coefficients i 2 pi k_i c(k).
std::vector<SpectralField> gradient(const SpectralField& f);

/// Samples f on the uniform grid. Requires resolution >= 2 band + 1.
GridField to_grid(const SpectralField& f, int resolution);

/// Discrete Fourier coefficients |k| <= band of grid data.
/// Requires band <= (resolution - 1) / 2.
SpectralField from_grid(const GridField& g, int band);

double min_on_grid(const SpectralField& f, int resolution);

struct ProbabilityReport {
  bool ok = false;
  double mass_defect = 0.0;       // |c(0) - 1|
  double hermitian_defect = 0.0;  // max |c(-k) - conj c(k)|
  double min_density = 0.0;       // min over the grid
};

/// Membership test for the set of band-limited probability coefficient vectors.
ProbabilityReport is_probability_coeffs(const SpectralField& f, int resolution, double tol);

/// int f g dx = Re sum_k f(k) conj(g(k)), over the union band.
double pairing(const SpectralField& f, const SpectralField& g);

/// L2 distance via Parseval on the union band.
double l2_error(const SpectralField& f, const SpectralField& g);

/// Sup-norm distance sampled on a common grid.
double linf_error(const SpectralField& f, const SpectralField& g, int resolution);

/// Smallest constant C with sup|phi - phi*D^N| <= C ||phi||_{2,q} / N^{q - d/2}
/// obtained from Cauchy-Schwarz on the tail: the shell sum of (1+|k|^2)^{-q}
/// over |k| > N, square-rooted and scaled by N^{q - d/2}. Requires q > d/2.
double tail_sum_constant(int dim, double q, int n);

}  // namespace fgmfc
