// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "riesz_osc/spectral.hpp"

namespace riesz_osc::spectral {

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  l.intercept = my - l.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (l.intercept + l.slope * x[i]);
    ss += r * r;
  }
  l.rms = std::sqrt(ss / n);
  return l;
}

}  // namespace

KatoReport kato_check(const ProjectionSet& proj, std::size_t N_star, std::size_t samples, std::uint64_t seed) {
  const std::size_t K = proj.K;
  if (proj.find(N_star) == nullptr) {
    std::ostringstream os;
    os << "no projection for N_star = " << N_star;
    throw Error(os.str());
  }
  std::size_t n_max = N_star;
  while (proj.find(n_max + 1) != nullptr) ++n_max;

  KatoReport rep;
  rep.N_star = N_star;
  rep.n_max = n_max;
  rep.sample_count = samples;
  const std::size_t m = n_max - N_star + 1;

  // Row n of the stacked map is e_n^* (P_n - P_n^0).
  linalg::ComplexMatrix R(m, K);
  for (std::size_t i = 0; i < m; ++i) {
    const Projection& p = *proj.find(N_star + i);
    const std::size_t row = p.n - 1;
    for (std::size_t j = 0; j < K; ++j) R(i, j) = p.entry(row, j) - (j == row ? 1.0 : 0.0);
  }
  rep.per_n.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    rep.per_n[i].n = N_star + i;
    rep.per_n[i].row_norm_sq = std::pow(linalg::norm2(R.row(i)), 2);
  }

  const auto G = R * R.adjoint();
  rep.c0_operator = linalg::singular_values(G).front();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> u(K);
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& x : u) x = cplx(g(rng), g(rng));
    const double nu = linalg::norm2(u);
    for (auto& x : u) x /= nu;
    const auto y = linalg::multiply(R, u);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double t = std::norm(y[i]);
      total += t;
      rep.per_n[i].sampled_mean += t;
    }
    rep.c0_sampled = std::max(rep.c0_sampled, total);
  }
  if (samples > 0)
    for (auto& t : rep.per_n) t.sampled_mean /= double(samples);
  rep.c0_estimate = std::max(rep.c0_operator, rep.c0_sampled);
  return rep;
}

KatoReport find_kato_N_star(const ProjectionSet& proj, std::size_t max_N_star, std::size_t samples, double target,
                            std::uint64_t seed) {
  std::size_t lo = proj.N + 3;
  if (proj.find(lo) == nullptr) throw Error("projections do not start at N + 3");
  std::size_t hi = lo;
  while (proj.find(hi + 1) != nullptr && hi + 1 <= max_N_star) ++hi;
  // Dropping rows never increases the stacked norm, so c0 is monotone in N_star.
  KatoReport best = kato_check(proj, lo, samples, seed);
  if (best.c0_estimate <= target) return best;
  KatoReport last = kato_check(proj, hi, samples, seed);
  if (last.c0_estimate > target) return last;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    KatoReport r = kato_check(proj, mid, samples, seed);
    if (r.c0_estimate <= target) {
      hi = mid;
      last = std::move(r);
    } else {
      lo = mid;
    }
  }
  return last;
}

GrowthReport projection_growth(const SpectralResult& result, std::size_t n_lo, std::size_t n_hi) {
  if (n_lo == 0 || n_hi < n_lo || n_hi > result.K) throw Error("invalid index range for projection growth");
  std::vector<std::size_t> bad;
  for (std::size_t n = n_lo; n <= n_hi; ++n)
    if (!result.trusted[n - 1]) bad.push_back(n);
  if (!bad.empty()) {
    std::ostringstream os;
    os << "untrusted indices in growth range:";
    for (auto n : bad) os << ' ' << n;
    throw UntrustedIndexError(os.str(), bad);
  }
  GrowthReport rep;
  std::vector<double> x, y;
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    GrowthRow r;
    r.n = n;
    r.norm = result.condition[n - 1];
    r.sqrt_n = std::sqrt(double(n));
    r.log_norm = std::log(r.norm);
    r.lambda = result.eigenvalues[n - 1];
    x.push_back(r.sqrt_n);
    y.push_back(r.log_norm);
    rep.rows.push_back(r);
  }
  const Line l = least_squares(x, y);
  rep.slope = l.slope;
  rep.intercept = l.intercept;
  return rep;
}

GrowthReport projection_growth(const GalerkinOperator& op, std::size_t n_lo, std::size_t n_hi,
                               const SpectrumOptions& opts) {
  return projection_growth(compute_spectrum(op, std::nullopt, opts), n_lo, n_hi);
}

DecayFit radius_decay_fit(const SpectralResult& result, const forms::EnvelopeFit& fit, std::size_t n_min) {
  DecayFit out;
  out.log_corrected = 2.0 * fit.alpha <= 1.0;
  const std::size_t first = std::max<std::size_t>(n_min + 1, 3);
  std::vector<double> x, y;
  std::size_t trusted = 0;
  for (std::size_t n = first; n <= result.K; ++n) {
    if (!result.trusted[n - 1]) continue;
    ++trusted;
    const double d = std::abs(result.eigenvalues[n - 1] - result.mu[n - 1]);
    // Levels untouched by the form (parity) sit at mu_n to within the
    // eigenvalue's own convergence tolerance.
    if (d <= result.tolerance[n - 1]) continue;
    const double ln = std::log(double(n));
    x.push_back(ln);
    y.push_back(std::log(d) - (out.log_corrected ? std::log(ln) : 0.0));
    if (out.n_lo == 0) out.n_lo = n;
    out.n_hi = n;
  }
  out.points = x.size();
  if (x.empty() && trusted > 0) {
    out.degenerate_zero = true;
    out.exponent = -std::numeric_limits<double>::infinity();
    return out;
  }
  if (x.size() < 8) {
    std::ostringstream os;
    os << "radius decay fit needs 8 trusted eigenvalues off mu_n, found " << x.size();
    throw Error(os.str());
  }
  const Line l = least_squares(x, y);
  out.exponent = l.slope;
  out.intercept = l.intercept;
  out.residual = l.rms;
  return out;
}

}  // namespace riesz_osc::spectral
