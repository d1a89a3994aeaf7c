// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_osc/hermite.hpp"

#include <cmath>
#include <limits>

#include "riesz_osc/common.hpp"

namespace riesz_osc::hermite {

namespace {

constexpr double kPiQuarter = 0.75112554446494248286;  // pi^{-1/4}
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr int kRescaleExp = 400;

// exp(-x^2/2) as (g, k) with value g * 2^k, so arguments far past the
// underflow threshold keep full relative accuracy.
void gaussian_factor(double x, double& g, long& k) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  const double t = 0.5 * hi;
  const double kk = std::nearbyint(t / kLn2Hi);
  const double r = (t - kk * kLn2Hi) - kk * kLn2Lo;
  g = std::exp(-r) * std::exp(-0.5 * lo);
  k = -static_cast<long>(kk);
}

double assemble(double mantissa, long exponent, double g, long gk, bool& underflow) {
  if (mantissa == 0.0) {
    underflow = false;
    return 0.0;
  }
  const long e = exponent + gk;
  double v = 0.0;
  if (e > -2200) {
    const double mg = mantissa * g;
    int me = 0;
    const double mm = std::frexp(mg, &me);
    const long total = e + me;
    v = total < std::numeric_limits<int>::min() / 2 ? 0.0 : std::ldexp(mm, static_cast<int>(total));
  }
  if (std::abs(v) < std::numeric_limits<double>::min()) {
    underflow = true;
    return 0.0;
  }
  underflow = false;
  return v;
}

// Runs the normalized recurrence at x >= 0 on scaled mantissas; `sink(k, m, e)`
// receives h_k = m * 2^e * exp(-x^2/2).
template <class Sink>
void recurrence(unsigned nmax, double x, Sink&& sink) {
  double prev = 0.0;
  double cur = kPiQuarter;
  long e = 0;
  sink(0u, cur, e);
  for (unsigned k = 0; k < nmax; ++k) {
    const double kd = k;
    const double next = x * std::sqrt(2.0 / (kd + 1.0)) * cur - std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > std::ldexp(1.0, kRescaleExp)) {
      cur = std::ldexp(cur, -kRescaleExp);
      prev = std::ldexp(prev, -kRescaleExp);
      e += kRescaleExp;
    }
    sink(k + 1, cur, e);
  }
}

}  // namespace

Value eval_flagged(unsigned n, double x) {
  const double ax = std::abs(x);
  double m = 0.0;
  long e = 0;
  recurrence(n, ax, [&](unsigned k, double mk, long ek) {
    if (k == n) {
      m = mk;
      e = ek;
    }
  });
  double g = 0.0;
  long gk = 0;
  gaussian_factor(ax, g, gk);
  bool underflow = false;
  double v = assemble(m, e, g, gk, underflow);
  if (x < 0 && (n & 1u)) v = -v;
  return {v, underflow};
}

double eval(unsigned n, double x) { return eval_flagged(n, x).value; }

std::vector<double> eval_all(unsigned nmax, double x) {
  const double ax = std::abs(x);
  double g = 0.0;
  long gk = 0;
  gaussian_factor(ax, g, gk);
  std::vector<double> out(nmax + 1);
  recurrence(nmax, ax, [&](unsigned k, double mk, long ek) {
    bool underflow = false;
    double v = assemble(mk, ek, g, gk, underflow);
    if (x < 0 && (k & 1u)) v = -v;
    out[k] = v;
  });
  return out;
}

double log_abs_center_value(std::uint64_t n) {
  // |h_{2m}(0)|^2 = pi^{-1/2} prod_{k=1}^m (1 - 1/(2k)).
  const std::uint64_t m = n / 2;
  double s = 0.0, c = 0.0;
  for (std::uint64_t k = 1; k <= m; ++k) {
    const double y = std::log1p(-0.5 / static_cast<double>(k)) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return -0.25 * std::log(kPi) + 0.5 * s;
}

double center_value(std::uint64_t n) {
  if (n & 1u) return 0.0;
  const double mag = std::exp(log_abs_center_value(n));
  return ((n / 2) & 1u) ? -mag : mag;
}

Regime regime(unsigned n, double x) {
  const double big_n = 2.0 * n + 1.0;
  const double sn = std::sqrt(big_n);
  const double band = std::pow(big_n, -1.0 / 6.0);
  x = std::abs(x);
  if (x <= sn - band) return Regime::bulk;
  if (x <= sn + band) return Regime::turning;
  if (x <= std::sqrt(2.0 * big_n)) return Regime::airy;
  return Regime::gaussian;
}

double regime_bound(unsigned n, double x, double xi) {
  const double big_n = 2.0 * n + 1.0;
  const double sn = std::sqrt(big_n);
  x = std::abs(x);
  switch (regime(n, x)) {
    case Regime::bulk:
      return std::pow(sn * (sn - x), -0.25);
    case Regime::turning:
      return std::pow(big_n, -1.0 / 12.0);
    case Regime::airy: {
      const double d = x - sn;
      return std::exp(-xi * std::pow(big_n, 0.25) * std::pow(d, 1.5)) / std::pow(sn * d, 0.25);
    }
    case Regime::gaussian:
      return std::exp(-xi * x * x);
  }
  return 0.0;
}

double envelope(unsigned n, double x, const EnvelopeParams& p) { return p.c_env * regime_bound(n, x, p.xi); }

}  // namespace riesz_osc::hermite
