// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "riesz_osc/kernels.hpp"

namespace riesz_osc::kernels::reference {

void accumulate_weighted_outer(std::span<const cplx> w, std::span<const double> v, std::size_t K,
                               linalg::ComplexMatrix& out) {
  for (std::size_t m = 0; m < K; ++m) {
    auto row = out.row(m);
    for (std::size_t q = 0; q < w.size(); ++q) {
      const double* vq = v.data() + q * K;
      const cplx wm = w[q] * vq[m];
      if (wm == cplx{}) continue;
      for (std::size_t n = 0; n < K; ++n) row[n] += wm * vq[n];
    }
  }
}

std::vector<std::vector<double>> weighted_max(const linalg::ComplexMatrix& a, std::span<const double> alphas,
                                              std::span<const std::size_t> sizes) {
  std::vector<std::vector<double>> out(alphas.size(), std::vector<double>(sizes.size(), 0.0));
  for (std::size_t m = 1; m <= a.rows(); ++m) {
    for (std::size_t n = 1; n <= a.cols(); ++n) {
      const double v = std::abs(a(m - 1, n - 1));
      if (v == 0.0) continue;
      const double lmn = std::log(double(m) * double(n));
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double r = v * std::exp(alphas[i] * lmn);
        for (std::size_t s = 0; s < sizes.size(); ++s)
          if (m <= sizes[s] && n <= sizes[s] && r > out[i][s]) out[i][s] = r;
      }
    }
  }
  return out;
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace riesz_osc::kernels::reference
