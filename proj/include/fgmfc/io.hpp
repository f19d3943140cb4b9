// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "fgmfc/control.hpp"
#include "fgmfc/fbsolver.hpp"

namespace fgmfc {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// CSV with header `k1,...,kd,re,im`, one row per stored mode in layout order.
std::string field_to_csv(const SpectralField& f);
/// Parses field CSV text. Modes not listed are zero; the band is the largest
/// listed |k|.
SpectralField field_from_csv(const std::string& text);

void write_field_csv(const std::string& path, const SpectralField& f);
SpectralField read_field_csv(const std::string& path);

/// 64-bit FNV-1a digest as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Writes node_XXXX.csv for every time node plus manifest.json (time grid,
/// role, dimension, band, config hash) into `dir`, creating it if needed.
void write_path(const std::string& dir, const CoefficientPath& path, const std::string& config_hash);

/// Reads a directory written by write_path.
CoefficientPath read_path(const std::string& dir);

/// JSON object with picard_iterations, final_residual, min_density,
/// min_density_truncated, cutoff_activations and further diagnostics.
/// Wall time is left out so that reruns produce identical files.
std::string report_to_json(const SolveReport& report);

std::string cost_to_json(const CostBreakdown& cost);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace fgmfc
