// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace riesz_osc::hermite {

/// Constants of the four-regime bound on |h_n(x)|.
struct EnvelopeParams {
  double xi;     ///< decay rate in the two tail regimes
  double c_env;  ///< overall constant
};

/// Produced by tools/calibrate_envelope: max |h_n(x)| / regime_bound over
/// n <= 500 on a 0.002-spaced x grid is 0.797884, in the bulk regime at x = 0,
/// where the ratio increases toward sqrt(2/pi). Rounded up with 3% margin.
/// xi must stay below ~0.133 or the Gaussian regime undercuts h_n at x = sqrt(2N).
inline constexpr EnvelopeParams kCalibratedEnvelope{0.1, 0.82};

struct Value {
  double value;
  /// True when the exact value is below the smallest normal double and 0 was returned.
  bool tail_underflow;
};

/// Normalized Hermite function h_n(x) by the three-term recurrence.
double eval(unsigned n, double x);
Value eval_flagged(unsigned n, double x);

/// h_0(x), ..., h_nmax(x) in one recurrence pass.
std::vector<double> eval_all(unsigned nmax, double x);

/// Exact h_n(0) from the closed form, log-space; zero for odd n.
double center_value(std::uint64_t n);
/// log|h_n(0)| for even n.
double log_abs_center_value(std::uint64_t n);

enum class Regime { bulk = 1, turning = 2, airy = 3, gaussian = 4 };

Regime regime(unsigned n, double x);
/// The four-regime bound without the constant c_env; x >= 0.
double regime_bound(unsigned n, double x, double xi);
/// c_env * regime_bound(n, |x|, xi).
double envelope(unsigned n, double x, const EnvelopeParams& p = kCalibratedEnvelope);

}  // namespace riesz_osc::hermite
