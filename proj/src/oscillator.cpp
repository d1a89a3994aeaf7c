// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_osc/oscillator.hpp"

#include <cmath>
#include <sstream>

#include "riesz_osc/common.hpp"

namespace riesz_osc {

OscillatorModel OscillatorModel::harmonic() {
  OscillatorModel m;
  m.hermite_ = true;
  m.tail_gap_ = 2.0;
  m.delta_gap_ = 2.0;
  return m;
}

OscillatorModel OscillatorModel::table(std::vector<double> mu, double tail_gap) {
  if (mu.empty()) throw Error("eigenvalue table is empty");
  if (!(tail_gap > 0.0)) throw Error("tail gap must be positive");
  double gap = tail_gap;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(mu[i]) || mu[i] <= 0.0) throw Error("eigenvalues must be finite and positive");
    if (i > 0) {
      if (mu[i] <= mu[i - 1]) throw Error("eigenvalues must be strictly increasing");
      gap = std::min(gap, mu[i] - mu[i - 1]);
    }
  }
  OscillatorModel m;
  m.table_ = std::move(mu);
  m.tail_gap_ = tail_gap;
  m.delta_gap_ = gap;
  return m;
}

double OscillatorModel::mu(std::size_t n) const {
  if (n == 0) throw Error("eigenvalue indices start at 1");
  if (table_.empty()) return 2.0 * static_cast<double>(n) - 1.0;
  if (n <= table_.size()) return table_[n - 1];
  return table_.back() + tail_gap_ * static_cast<double>(n - table_.size());
}

std::vector<double> OscillatorModel::mu_range(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t n = 1; n <= count; ++n) out[n - 1] = mu(n);
  return out;
}

std::string OscillatorModel::describe() const {
  std::ostringstream os;
  if (hermite_)
    os << "harmonic oscillator (mu_n = 2n - 1)";
  else
    os << "tabulated spectrum (" << table_.size() << " values, tail gap " << tail_gap_ << ")";
  return os.str();
}

}  // namespace riesz_osc
