// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "riesz_osc/forms.hpp"

namespace riesz_osc::forms::detail {

/// Nodes with two weight sets on the same node list: `fine` integrates with
/// every panel split in two, `coarse` with whole panels. Their difference
/// estimates the quadrature error.
struct PanelRule {
  std::vector<double> x;
  std::vector<double> fine;
  std::vector<double> coarse;
  std::size_t panels = 0;
};

/// Adaptive composite Gauss-Legendre rule on [-X, X] for products of Hermite
/// functions of index < K against V, graded toward V's singular points.
PanelRule potential_rule(const FunctionPotential& f, std::size_t K);

void require_hermite(const OscillatorModel& model);

}  // namespace riesz_osc::forms::detail
