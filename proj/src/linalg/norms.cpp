// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "riesz_osc/linalg.hpp"

namespace riesz_osc::linalg {

namespace {

double power_run(const ComplexMatrix& a, std::vector<cplx> v, const NormOptions& opts) {
  double nv = norm2(v);
  if (nv == 0.0) return 0.0;
  for (auto& x : v) x /= nv;
  double est = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const auto av = multiply(a, v);
    auto w = multiply_adjoint(a, av);
    const double lam = std::real(dot(v, w));  // Rayleigh quotient of A^*A
    nv = norm2(w);
    if (nv == 0.0) return 0.0;
    for (auto& x : w) x /= nv;
    v = std::move(w);
    if (it > 0 && std::abs(lam - est) <= opts.rel_tol * std::abs(lam)) {
      est = lam;
      break;
    }
    est = lam;
  }
  return std::sqrt(std::max(est, 0.0));
}

}  // namespace

double operator_norm(const ComplexMatrix& a, const NormOptions& opts) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> g;
  double best = 0.0;
  const int runs = std::max(1, opts.restarts);
  for (int r = 0; r < runs; ++r) {
    std::vector<cplx> v(a.cols());
    for (auto& x : v) x = {g(rng), g(rng)};
    best = std::max(best, power_run(a, std::move(v), opts));
  }
  return best;
}

std::vector<double> singular_values(const ComplexMatrix& a) {
  // One-sided Jacobi on columns; works on the transpose when it is wider than tall.
  ComplexMatrix w = a.cols() > a.rows() ? a.adjoint() : a;
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  // Column-major working copy so column rotations are contiguous.
  std::vector<std::vector<cplx>> col(n, std::vector<cplx>(m));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) col[j][i] = w(i, j);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto& ap = col[p];
        auto& aq = col[q];
        double alpha = 0.0, beta = 0.0;
        cplx gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(ap[i]);
          beta += std::norm(aq[i]);
          gamma += std::conj(ap[i]) * aq[i];
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const cplx x = ap[i];
          const cplx y = aq[i] * std::conj(phase);
          ap[i] = c * x - s * y;
          aq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = norm2(col[j]);
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

std::size_t numerical_rank(const ComplexMatrix& a, double rel_tol) {
  const auto sv = singular_values(a);
  if (sv.empty() || sv.front() == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(sv.begin(), sv.end(), [&](double s) { return s > rel_tol * sv.front(); }));
}

}  // namespace riesz_osc::linalg
