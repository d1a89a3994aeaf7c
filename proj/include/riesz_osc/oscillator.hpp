// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace riesz_osc {

/// Unperturbed self-adjoint operator given by its simple positive eigenvalues
/// mu_1 < mu_2 < ... (1-based).
class OscillatorModel {
 public:
  /// -d^2/dx^2 + x^2 with psi_n = h_{n-1} and mu_n = 2n - 1.
  static OscillatorModel harmonic();

  /// mu_1..mu_L from the table, continued linearly with spacing `tail_gap`.
  /// The eigenbasis is abstract, so only raw-matrix forms apply.
  static OscillatorModel table(std::vector<double> mu, double tail_gap);

  double mu(std::size_t n) const;
  std::vector<double> mu_range(std::size_t count) const;  // mu_1..mu_count

  /// Smallest gap mu_{n+1} - mu_n over all n.
  double delta_gap() const { return delta_gap_; }
  /// Gaps are at least 1 and mu_1 >= 1, so mu_k >= k and the unit-gap
  /// estimates apply without rescaling.
  bool normalized() const { return delta_gap_ >= 1.0 && mu(1) >= 1.0; }
  /// psi_n = h_{n-1}: Hermite-based forms may be evaluated.
  bool hermite_basis() const { return hermite_; }

  std::string describe() const;

  /// Tabulated values (empty for the harmonic model) and the continuation spacing.
  const std::vector<double>& table_values() const { return table_; }
  double tail_gap() const { return tail_gap_; }

 private:
  OscillatorModel() = default;
  std::vector<double> table_;
  double tail_gap_ = 2.0;
  double delta_gap_ = 2.0;
  bool hermite_ = false;
};

}  // namespace riesz_osc
