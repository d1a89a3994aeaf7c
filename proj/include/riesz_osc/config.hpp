// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "riesz_osc/forms.hpp"
#include "riesz_osc/io.hpp"
#include "riesz_osc/oscillator.hpp"

namespace riesz_osc::config {

struct PipelineOptions {
  /// Truncation size; 0 picks spectral::default_K(N).
  std::size_t K = 0;
  /// Unset: spectral::default_trust_tol(form).
  std::optional<double> trust_tol;
  double max_roundoff = 1e-6;
  std::size_t fit_grid = 256;
  std::size_t samples_per_arc = 16;
  std::size_t kato_samples = 64;
  std::size_t contour_nodes = 64;
  /// How many trusted indices the diagnose command also runs through the contour route.
  std::size_t contour_indices = 4;
  /// Inclusive index range for the projection-norm fit; unset uses [N + 2, K / 8].
  std::optional<std::pair<std::size_t, std::size_t>> growth_range;
  std::uint64_t seed = 1;
};

struct RunConfig {
  OscillatorModel model = OscillatorModel::harmonic();
  forms::PerturbationForm form;
  PipelineOptions pipeline;
  std::string out_dir = ".";
  io::json source;
};

/// Throws Error naming the offending key on unknown keys or bad values.
/// Relative paths inside the config (raw matrices) resolve against `base_dir`.
RunConfig parse_config(const io::json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const io::json& j);

}  // namespace riesz_osc::config
