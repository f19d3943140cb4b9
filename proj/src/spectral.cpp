// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fgmfc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fft.hpp"
#include "fgmfc/error.hpp"

namespace fgmfc {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Flat positions of the modes of a (dim, band) field inside a resolution^d FFT
// buffer (negative wave numbers wrap around).
std::vector<std::size_t> wrapped_positions(int dim, int band, int resolution) {
  const int side = 2 * band + 1;
  const std::size_t count = ipow(static_cast<std::size_t>(side), dim);
  std::vector<std::size_t> out(count);
  std::vector<int> k(static_cast<std::size_t>(dim), -band);
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t pos = 0;
    for (int i = 0; i < dim; ++i) {
      const int w = k[i] < 0 ? k[i] + resolution : k[i];
      pos = pos * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(w);
    }
    out[flat] = pos;
    for (int i = dim - 1; i >= 0; --i) {
      if (++k[i] <= band) break;
      k[i] = -band;
    }
  }
  return out;
}

// Copies the overlapping modes of `src` into `dst` (both of the same dim).
void copy_common_modes(const SpectralField& src, SpectralField& dst) {
  const int common = std::min(src.band(), dst.band());
  const int dim = src.dim();
  std::vector<int> k(static_cast<std::size_t>(dim), -common);
  const std::size_t count = ipow(static_cast<std::size_t>(2 * common + 1), dim);
  for (std::size_t n = 0; n < count; ++n) {
    dst[dst.index_of(k)] = src[src.index_of(k)];
    for (int i = dim - 1; i >= 0; --i) {
      if (++k[i] <= common) break;
      k[i] = -common;
    }
  }
}

void require_same_dim(const SpectralField& f, const SpectralField& g) {
  if (f.dim() != g.dim()) {
    std::ostringstream os;
    os << "dimension mismatch: " << f.dim() << " vs " << g.dim();
    throw InvalidArgument(os.str());
  }
}

}  // namespace

int ModeIndex::norm() const {
  int n = 0;
  for (int c : components) n = std::max(n, std::abs(c));
  return n;
}

ModeIndex ModeIndex::negated() const {
  ModeIndex out = *this;
  for (int& c : out.components) c = -c;
  return out;
}

SpectralField::SpectralField(int dim, int band) : dim_(dim), band_(band) {
  if (dim < 1) throw InvalidArgument("spectral field dimension must be positive");
  if (band < 0) throw InvalidArgument("spectral field band must be non-negative");
  coeffs_.assign(ipow(static_cast<std::size_t>(2 * band + 1), dim), Complex{});
}

SpectralField SpectralField::from_coeffs(int dim, int band, std::vector<Complex> coeffs) {
  SpectralField f(dim, band);
  if (coeffs.size() != f.coeffs_.size()) {
    std::ostringstream os;
    os << "expected " << f.coeffs_.size() << " coefficients for dim " << dim << ", band "
       << band << ", got " << coeffs.size();
    throw InvalidArgument(os.str());
  }
  f.coeffs_ = std::move(coeffs);
  return f;
}

SpectralField SpectralField::constant(int dim, double value) {
  SpectralField f(dim, 0);
  f.coeffs_[0] = value;
  return f;
}

std::size_t SpectralField::index_of(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) throw InvalidArgument("mode has wrong dimension");
  std::size_t pos = 0;
  const auto s = static_cast<std::size_t>(side());
  for (int c : k) {
    if (std::abs(c) > band_) throw InvalidArgument("mode outside the stored band");
    pos = pos * s + static_cast<std::size_t>(c + band_);
  }
  return pos;
}

ModeIndex SpectralField::mode_at(std::size_t flat) const {
  ModeIndex m;
  m.components.resize(static_cast<std::size_t>(dim_));
  const auto s = static_cast<std::size_t>(side());
  for (int i = dim_ - 1; i >= 0; --i) {
    m.components[i] = static_cast<int>(flat % s) - band_;
    flat /= s;
  }
  return m;
}

int SpectralField::mode_norm(std::size_t flat) const {
  const auto s = static_cast<std::size_t>(side());
  int n = 0;
  for (int i = 0; i < dim_; ++i) {
    n = std::max(n, std::abs(static_cast<int>(flat % s) - band_));
    flat /= s;
  }
  return n;
}

Complex SpectralField::at(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) throw InvalidArgument("mode has wrong dimension");
  for (int c : k)
    if (std::abs(c) > band_) return {};
  return coeffs_[index_of(k)];
}

Complex SpectralField::at(std::initializer_list<int> k) const {
  return at(std::span<const int>(k.begin(), k.size()));
}

void SpectralField::set(std::span<const int> k, Complex value) { coeffs_[index_of(k)] = value; }

void SpectralField::set(std::initializer_list<int> k, Complex value) {
  set(std::span<const int>(k.begin(), k.size()), value);
}

double SpectralField::hermitian_defect() const {
  double d = 0.0;
  const std::size_t n = coeffs_.size();
  for (std::size_t i = 0; i < n; ++i)
    d = std::max(d, std::abs(coeffs_[n - 1 - i] - std::conj(coeffs_[i])));
  return d;
}

SpectralField& SpectralField::symmetrize() {
  const std::size_t n = coeffs_.size();
  for (std::size_t i = 0; i <= n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const Complex avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
    coeffs_[i] = avg;
    coeffs_[j] = std::conj(avg);
  }
  return *this;
}

SpectralField SpectralField::with_band(int band) const {
  if (band == band_) return *this;
  SpectralField out(dim_, band);
  copy_common_modes(*this, out);
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!same_layout(other)) throw InvalidArgument("field layouts differ");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!same_layout(other)) throw InvalidArgument("field layouts differ");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

std::vector<double> GridField::point(std::size_t flat) const {
  std::vector<double> x(static_cast<std::size_t>(dim));
  const auto g = static_cast<std::size_t>(resolution);
  for (int i = dim - 1; i >= 0; --i) {
    x[i] = static_cast<double>(flat % g) / resolution;
    flat /= g;
  }
  return x;
}

std::size_t grid_point_count(int dim, int resolution) {
  return ipow(static_cast<std::size_t>(resolution), dim);
}

int fft_friendly_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

int default_grid_size(int band) { return fft_friendly_size(4 * band + 1); }

SpectralField dirichlet_truncate(const SpectralField& f, int n) {
  if (n < 0) throw InvalidArgument("truncation level must be non-negative");
  return f.with_band(std::min(f.band(), n));
}

double sobolev_norm(const SpectralField& f, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double kn = f.mode_norm(i);
    s += std::pow(1.0 + kn * kn, q) * std::norm(f[i]);
  }
  return std::sqrt(s);
}

std::vector<SpectralField> gradient(const SpectralField& f) {
  std::vector<SpectralField> out(static_cast<std::size_t>(f.dim()), f);
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const ModeIndex k = f.mode_at(flat);
    for (int i = 0; i < f.dim(); ++i)
      out[i][flat] = Complex(0.0, kTwoPi * k.components[i]) * f[flat];
  }
  return out;
}

GridField to_grid(const SpectralField& f, int resolution) {
  if (resolution < 2 * f.band() + 1) {
    std::ostringstream os;
    os << "grid resolution " << resolution << " too small for band " << f.band()
       << " (need >= " << 2 * f.band() + 1 << ")";
    throw InvalidArgument(os.str());
  }
  const std::size_t total = grid_point_count(f.dim(), resolution);
  std::vector<Complex> buf(total);
  const auto pos = wrapped_positions(f.dim(), f.band(), resolution);
  for (std::size_t i = 0; i < pos.size(); ++i) buf[pos[i]] = f[i];
  detail::fft_inplace(buf, f.dim(), resolution, detail::FftDirection::kBackward);

  GridField g;
  g.dim = f.dim();
  g.resolution = resolution;
  g.values.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    g.values[i] = buf[i].real();
    g.imag_residue = std::max(g.imag_residue, std::abs(buf[i].imag()));
  }
  return g;
}

SpectralField from_grid(const GridField& g, int band) {
  if (band < 0 || 2 * band + 1 > g.resolution) {
    std::ostringstream os;
    os << "band " << band << " not representable on a grid of resolution " << g.resolution;
    throw InvalidArgument(os.str());
  }
  const std::size_t total = grid_point_count(g.dim, g.resolution);
  if (g.values.size() != total) throw InvalidArgument("grid value count does not match shape");
  std::vector<Complex> buf(g.values.begin(), g.values.end());
  detail::fft_inplace(buf, g.dim, g.resolution, detail::FftDirection::kForward);
  const double scale = 1.0 / static_cast<double>(total);
  SpectralField f(g.dim, band);
  const auto pos = wrapped_positions(g.dim, band, g.resolution);
  for (std::size_t i = 0; i < pos.size(); ++i) f[i] = buf[pos[i]] * scale;
  return f.symmetrize();
}

double min_on_grid(const SpectralField& f, int resolution) {
  const GridField g = to_grid(f, resolution);
  return *std::min_element(g.values.begin(), g.values.end());
}

ProbabilityReport is_probability_coeffs(const SpectralField& f, int resolution, double tol) {
  ProbabilityReport r;
  r.mass_defect = std::abs(f[f.zero_index()] - 1.0);
  r.hermitian_defect = f.hermitian_defect();
  r.min_density = min_on_grid(f, resolution);
  r.ok = r.mass_defect <= tol && r.hermitian_defect <= tol && r.min_density >= -tol;
  return r;
}

double pairing(const SpectralField& f, const SpectralField& g) {
  require_same_dim(f, g);
  if (f.band() > g.band()) return pairing(g, f);
  // f has the smaller band: iterate over its modes.
  double s = 0.0;
  if (f.same_layout(g)) {
    for (std::size_t i = 0; i < f.size(); ++i) s += (f[i] * std::conj(g[i])).real();
    return s;
  }
  const SpectralField gg = g.with_band(f.band());
  for (std::size_t i = 0; i < f.size(); ++i) s += (f[i] * std::conj(gg[i])).real();
  return s;
}

double l2_error(const SpectralField& f, const SpectralField& g) {
  require_same_dim(f, g);
  const int band = std::max(f.band(), g.band());
  const SpectralField diff = f.with_band(band) - g.with_band(band);
  return sobolev_norm(diff, 0.0);
}

double linf_error(const SpectralField& f, const SpectralField& g, int resolution) {
  require_same_dim(f, g);
  const int band = std::max(f.band(), g.band());
  const GridField grid = to_grid(f.with_band(band) - g.with_band(band), resolution);
  double m = 0.0;
  for (double v : grid.values) m = std::max(m, std::abs(v));
  return m;
}

double tail_sum_constant(int dim, double q, int n) {
  if (n < 1) throw InvalidArgument("tail constant needs N >= 1");
  if (2.0 * q <= dim) throw InvalidArgument("tail constant needs q > d/2");
  // Shell |k| = s holds (2s+1)^d - (2s-1)^d modes.
  const int last = n + 200000;
  double sum = 0.0;
  for (int s = last; s > n; --s) {
    const double shell = std::pow(2.0 * s + 1.0, dim) - std::pow(2.0 * s - 1.0, dim);
    sum += shell * std::pow(1.0 + static_cast<double>(s) * s, -q);
  }
  // Remainder beyond `last`, bounded by the integral of 2d (3x)^{d-1} x^{-2q}.
  sum += 2.0 * dim * std::pow(3.0, dim - 1) * std::pow(static_cast<double>(last), dim - 2.0 * q) /
         (2.0 * q - dim);
  return std::sqrt(sum) * std::pow(static_cast<double>(n), q - 0.5 * dim);
}

}  // namespace fgmfc
