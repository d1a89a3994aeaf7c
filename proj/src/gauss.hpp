// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace riesz_osc::detail {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Cached per order; Newton iteration on the Legendre recurrence.
const GaussRule& gauss_legendre(int order);

}  // namespace riesz_osc::detail
