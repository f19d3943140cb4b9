// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "fgmfc/error.hpp"

namespace fgmfc::detail {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// FFTW_UNALIGNED keeps the plan valid for any std::vector buffer and makes the
// chosen codelets independent of allocation alignment, so results are
// bit-reproducible from run to run.
fftw_plan get_plan(int dim, int resolution, int sign) {
  auto& cache = plan_cache();
  std::lock_guard lock(cache.mutex);
  const auto key = std::make_tuple(dim, resolution, sign);
  if (auto it = cache.plans.find(key); it != cache.plans.end()) return it->second;

  std::vector<int> shape(static_cast<std::size_t>(dim), resolution);
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(resolution);
  std::vector<std::complex<double>> scratch(total);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft(dim, shape.data(), buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw Error(ErrorCode::kInternal, "FFTW failed to create a plan");
  cache.plans.emplace(key, plan);
  return plan;
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, int dim, int resolution,
                 FftDirection direction) {
  const int sign = direction == FftDirection::kForward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = get_plan(dim, resolution, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace fgmfc::detail
