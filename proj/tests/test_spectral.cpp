// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fgmfc/harness.hpp"
#include "fgmfc/io.hpp"
#include "fgmfc/spectral.hpp"

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

// Direct DFT synthesis sum_k c_k e^{2 pi i k.x} at grid points j/G.
std::vector<double> direct_synthesis(const SpectralField& f, int g) {
  std::vector<double> out(grid_point_count(f.dim(), g));
  std::vector<int> idx(static_cast<std::size_t>(f.dim()), 0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const ModeIndex k = f.mode_at(i);
      double phase = 0.0;
      for (int c = 0; c < f.dim(); ++c) phase += k.components[c] * static_cast<double>(idx[c]) / g;
      acc += f[i] * std::exp(Complex(0.0, kTwoPi * phase));
    }
    out[p] = acc.real();
    for (int c = f.dim() - 1; c >= 0; --c) {
      if (++idx[c] < g) break;
      idx[c] = 0;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("layout is lexicographic with k1 slowest and mirrors -k") {
  SpectralField f(2, 1);
  CHECK(f.size() == 9);
  CHECK(f.mode_at(0).components == std::vector<int>{-1, -1});
  CHECK(f.mode_at(1).components == std::vector<int>{-1, 0});
  CHECK(f.mode_at(8).components == std::vector<int>{1, 1});
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.mode_at(f.size() - 1 - i).components == f.mode_at(i).negated().components);
  CHECK(f.mode_norm(f.index_of(std::vector<int>{1, -1})) == 1);
}

TEST_CASE("dirichlet_truncate") {
  const SpectralField f = random_smooth_field(1, 2, 2.0, 3);
  CHECK(dirichlet_truncate(f, 2) == f);
  const SpectralField z = dirichlet_truncate(cosine(3), 2);
  CHECK(z.band() == 2);
  for (const auto& c : z.coeffs()) CHECK(c == Complex(0.0, 0.0));
  CHECK_THROWS_AS(dirichlet_truncate(f, -1), InvalidArgument);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SpectralField g = random_smooth_field(1 + static_cast<int>(s % 2), 16, 3.0, s);
    for (int n : {2, 4, 8}) {
      const SpectralField t = dirichlet_truncate(g, n);
      CHECK(t.hermitian_defect() == 0.0);
      CHECK(dirichlet_truncate(t, n) == t);
      for (double q : {2.0, 4.0}) CHECK(l2_error(g, t) <= sobolev_norm(g, q) / std::pow(n, q));
    }
  }
}

TEST_CASE("sobolev_norm") {
  CHECK(sobolev_norm(SpectralField::constant(1, 1.0), 3.0) == doctest::Approx(1.0));
  CHECK(sobolev_norm(cosine(1), 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SpectralField g = random_smooth_field(2, 16, 3.0, 100 + s);
    for (int n : {1, 3, 8})
      for (double q : {0.0, 2.0, 4.0}) CHECK(sobolev_norm(dirichlet_truncate(g, n), q) <= sobolev_norm(g, q));
    CHECK(std::abs(l2_error(g, SpectralField(2, 0)) - sobolev_norm(g, 0.0)) <= 1e-12);
  }
}

TEST_CASE("gradient") {
  for (const auto& c : gradient(SpectralField::constant(2, 1.0))) CHECK(sobolev_norm(c, 0.0) == 0.0);
  const auto g = gradient(cosine(1));
  CHECK(g[0].at({1}) == Complex(0.0, kPi));
  CHECK(g[0].at({-1}) == Complex(0.0, -kPi));
  const auto samples = to_grid(g[0], 8).values;
  for (int j = 0; j < 8; ++j) CHECK(samples[j] == doctest::Approx(-kTwoPi * std::sin(kTwoPi * j / 8.0)).epsilon(1e-13));
  const SpectralField f = random_smooth_field(2, 6, 2.0, 7);
  const auto a = gradient(dirichlet_truncate(f, 3));
  const auto b = gradient(f);
  for (int i = 0; i < 2; ++i) CHECK(a[i] == dirichlet_truncate(b[i], 3));
}

TEST_CASE("to_grid and from_grid") {
  for (double v : to_grid(SpectralField::constant(1, 1.0), 8).values) CHECK(v == doctest::Approx(1.0));
  const auto c = to_grid(cosine(1), 8).values;
  for (int j = 0; j < 8; ++j) CHECK(c[j] == doctest::Approx(std::cos(kTwoPi * j / 8.0)).epsilon(1e-14));
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const SpectralField f = random_smooth_field(1, 4, 0.0, 500 + s);
    const auto values = to_grid(f, 16).values;
    const auto direct = direct_synthesis(f, 16);
    for (std::size_t p = 0; p < values.size(); ++p) CHECK(std::abs(values[p] - direct[p]) <= 1e-12);
    const SpectralField back = from_grid(to_grid(f, 16), 4);
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(back[i] - f[i]));
  }
  CHECK(worst <= 1e-12);
  const SpectralField f2 = random_smooth_field(2, 3, 1.0, 9);
  CHECK(l2_error(from_grid(to_grid(f2, 7), 3), f2) <= 1e-12);
  CHECK_THROWS_AS(to_grid(cosine(4), 8), InvalidArgument);
  CHECK_THROWS_AS(from_grid(to_grid(cosine(1), 8), 4), InvalidArgument);
}

TEST_CASE("min_on_grid and is_probability_coeffs") {
  CHECK(min_on_grid(SpectralField::constant(1, 1.0), 8) == doctest::Approx(1.0));
  CHECK(min_on_grid(density(0.5), 8) == doctest::Approx(0.5));
  CHECK(is_probability_coeffs(SpectralField::constant(1, 1.0), 8, 1e-12).ok);
  CHECK_FALSE(is_probability_coeffs(density(2.0), 8, 1e-12).ok);
  CHECK(is_probability_coeffs(density(2.0), 8, 1e-12).min_density == doctest::Approx(-1.0));
  CHECK(is_probability_coeffs(density(0.5), 8, 1e-12).ok);
  SpectralField bad = density(0.5);
  bad.set({1}, Complex(0.25, 0.1));
  CHECK_FALSE(is_probability_coeffs(bad, 8, 1e-12).ok);
}

TEST_CASE("l2_error and linf_error") {
  const SpectralField f = random_smooth_field(2, 4, 1.0, 11);
  CHECK(l2_error(f, f) == 0.0);
  CHECK(linf_error(f, f, 9) == 0.0);
  CHECK(l2_error(cosine(1), SpectralField(1, 0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(l2_error(f, cosine(1)), InvalidArgument);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const int dim = 1 + static_cast<int>(s % 2);
    const SpectralField g = random_smooth_field(dim, 16, 5.0, 900 + s);
    for (int n : {2, 4, 8})
      for (double q : {2.0, 4.0}) {
        const double bound = tail_sum_constant(dim, q, n) * sobolev_norm(g, q) / std::pow(n, q - 0.5 * dim);
        CHECK(linf_error(g, dirichlet_truncate(g, n), default_grid_size(16)) <= bound);
      }
  }
}

TEST_CASE("tail_sum_constant matches a direct tail sum") {
  // d = 1, q = 2: sum_{|k| > N} (1 + k^2)^{-2} summed to 10^6 plus an integral tail.
  const int n = 4;
  double sum = 0.0;
  for (int k = n + 1; k <= 1000000; ++k) sum += 2.0 * std::pow(1.0 + static_cast<double>(k) * k, -2.0);
  sum += 2.0 / (3.0 * std::pow(1e6, 3.0));
  CHECK(tail_sum_constant(1, 2.0, n) == doctest::Approx(std::sqrt(sum) * std::pow(n, 1.5)).epsilon(1e-9));
  CHECK_THROWS_AS(tail_sum_constant(2, 1.0, 4), InvalidArgument);
}

TEST_CASE("field CSV round trip is exact") {
  const SpectralField f = random_smooth_field(2, 3, 1.0, 21);
  const std::string text = field_to_csv(f);
  CHECK(text.rfind("k1,k2,re,im\n", 0) == 0);
  const SpectralField back = field_from_csv(text);
  CHECK(back == f);
  CHECK(field_to_csv(back) == text);
  CHECK_THROWS_AS(field_from_csv("a,b\n1,2\n"), IoError);
}
