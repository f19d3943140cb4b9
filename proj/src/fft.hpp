// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

namespace fgmfc::detail {

enum class FftDirection { kForward, kBackward };

// Unnormalised in-place d-dimensional DFT on a resolution^d cube.
// kForward uses exp(-2 pi i k x), kBackward exp(+2 pi i k x).
// Plans are cached per shape; execution is re-entrant.
void fft_inplace(std::vector<std::complex<double>>& data, int dim, int resolution,
                 FftDirection direction);

}  // namespace fgmfc::detail
