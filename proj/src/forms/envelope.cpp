// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "internal.hpp"

namespace riesz_osc::forms {

namespace {

double max_residual(const linalg::ComplexMatrix& b, double M_b, double alpha) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= b.rows(); ++m)
    for (std::size_t n = 1; n <= b.cols(); ++n)
      worst = std::max(worst, std::abs(b(m - 1, n - 1)) - M_b * std::pow(double(m) * double(n), -alpha));
  return worst;
}

// Slope of log max_n |b_mn| against log m over the upper part of the grid.
double regression_alpha(const linalg::ComplexMatrix& b) {
  const std::size_t G = b.rows();
  double top = 0.0;
  std::vector<double> rowmax(G, 0.0);
  for (std::size_t m = 0; m < G; ++m) {
    for (std::size_t n = 0; n < G; ++n) rowmax[m] = std::max(rowmax[m], std::abs(b(m, n)));
    top = std::max(top, rowmax[m]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t m = std::max<std::size_t>(G / 8, 1); m <= G; ++m) {
    const double r = rowmax[m - 1];
    if (!(r > 1e-14 * top)) continue;
    const double lx = std::log(double(m)), ly = std::log(r);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 4) return 0.0;
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return std::floor(-slope * 1000.0) / 1000.0;
}

}  // namespace

double zeta_upper(double s) {
  if (!(s > 1.0)) throw Error("zeta sum diverges for s <= 1");
  constexpr int J = 4096;
  double sum = 0.0;
  for (int j = J; j >= 1; --j) sum += std::pow(double(j), -s);
  return sum + std::pow(double(J), 1.0 - s) / (s - 1.0);
}

EnvelopeFit fit_envelope(const linalg::ComplexMatrix& block, const FitOptions& opts) {
  const std::size_t G = block.rows();
  if (G < 16 || !block.square()) throw Error("envelope fit needs a square grid of size >= 16");
  EnvelopeFit fit;
  fit.grid_size = G;

  std::vector<double> alphas{1.0 / 12.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0};
  const double reg = regression_alpha(block);
  const bool have_reg = reg > 0.0 && std::find(alphas.begin(), alphas.end(), reg) == alphas.end();
  if (have_reg) alphas.push_back(reg);
  const std::vector<std::size_t> sizes{G, G / 2, G / 4};
  const auto M = kernels::weighted_max(block, alphas, sizes, opts.backend);

  if (M[0][0] == 0.0) {
    fit.M_b = 0.0;
    fit.alpha = 0.5;
    fit.max_residual = 0.0;
    return fit;
  }

  double best_growth = std::numeric_limits<double>::infinity();
  int chosen = -1;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    AlphaCandidate c{alphas[i], M[i][0], M[i][1], M[i][2], false, have_reg && i + 1 == alphas.size()};
    const double g1 = c.M_full / c.M_half, g2 = c.M_half / c.M_quarter;
    // A regression exponent is only trusted if M_b is already saturated.
    const double limit = c.from_regression ? 1.0 + 1e-12 : opts.max_growth;
    c.admissible = g1 <= limit && g2 <= limit;
    if (!c.from_regression) best_growth = std::min(best_growth, g1 - 1.0);
    fit.candidates.push_back(c);
    if (c.admissible && (chosen < 0 || c.alpha > alphas[chosen])) chosen = static_cast<int>(i);
  }
  if (chosen < 0) {
    std::ostringstream os;
    os << "no local-subordination envelope: M_b grows by at least " << 100.0 * best_growth
       << "% per grid doubling for every candidate exponent";
    throw EnvelopeError(os.str(), best_growth);
  }
  fit.alpha = alphas[chosen];
  fit.M_b = M[chosen][0];
  fit.growth = M[chosen][0] / M[chosen][1] - 1.0;
  fit.max_residual = max_residual(block, fit.M_b, fit.alpha);
  return fit;
}

EnvelopeFit declared_envelope(const RawMatrix& raw) {
  EnvelopeFit fit;
  fit.M_b = raw.declared_M_b();
  fit.alpha = raw.declared_alpha();
  fit.grid_size = raw.size();
  fit.max_residual = raw.size() ? max_residual(raw.entries(), fit.M_b, fit.alpha) : 0.0;
  return fit;
}

EnvelopeFit fit_envelope(const PerturbationForm& form, const OscillatorModel& model, std::size_t grid_max,
                         const FitOptions& opts) {
  if (const auto* raw = std::get_if<RawMatrix>(&form.kind)) return declared_envelope(*raw);
  if (grid_max < 16) throw Error("envelope fit needs grid_max >= 16");
  return fit_envelope(matrix_block(form, model, grid_max, nullptr, opts.backend), opts);
}

SubordinationReport subordination_check(const linalg::ComplexMatrix& block, const OscillatorModel& model,
                                        const EnvelopeFit& fit, double p, std::size_t trials,
                                        std::uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) throw Error("subordination exponent p must lie in [0, 1)");
  if (!model.normalized()) throw Error("subordination check needs a normalized model (mu_k >= k)");
  SubordinationReport rep;
  rep.p = p;
  rep.beta = p / 2.0;
  const double s = 2.0 * (fit.alpha + rep.beta);
  if (!(s > 1.0)) throw Error("p too small for this envelope: need p > 1 - 2 alpha");
  rep.C_p = fit.M_b * zeta_upper(s);

  const std::size_t G = block.rows();
  const auto mu = model.mu_range(G);
  auto ratio = [&](const std::vector<std::size_t>& idx, const std::vector<cplx>& f) {
    cplx bff = 0.0;
    double a = 0.0, nrm = 0.0;
    for (std::size_t u = 0; u < idx.size(); ++u) {
      a += mu[idx[u]] * std::norm(f[u]);
      nrm += std::norm(f[u]);
      for (std::size_t v = 0; v < idx.size(); ++v) bff += std::conj(f[u]) * f[v] * block(idx[u], idx[v]);
    }
    if (nrm == 0.0) return 0.0;
    const double rhs = rep.C_p * std::pow(a, p) * std::pow(nrm, 1.0 - p);
    return rhs == 0.0 ? (std::abs(bff) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                      : std::abs(bff) / rhs;
  };

  for (std::size_t j = 0; j < G; ++j) rep.worst_ratio = std::max(rep.worst_ratio, ratio({j}, {cplx(1.0)}));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> decay(0.0, 1.5);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t support = 1 + rng() % std::min<std::size_t>(G, 64);
    std::vector<std::size_t> idx(support);
    for (auto& i : idx) i = rng() % G;
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    const double r = decay(rng);
    std::vector<cplx> f(idx.size());
    for (std::size_t u = 0; u < idx.size(); ++u) f[u] = cplx(g(rng), g(rng)) * std::pow(double(idx[u] + 1), -r);
    rep.worst_ratio = std::max(rep.worst_ratio, ratio(idx, f));
  }
  rep.trials = trials + G;
  rep.passed = rep.worst_ratio <= 1.0 + 1e-12;
  return rep;
}

}  // namespace riesz_osc::forms
