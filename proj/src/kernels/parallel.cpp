// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <exception>
#include <limits>

#include "riesz_osc/kernels.hpp"

#if defined(RIESZ_OSC_HAVE_OPENMP)
#include <omp.h>
#endif

namespace riesz_osc::kernels {

namespace parallel {

void accumulate_weighted_outer(std::span<const cplx> w, std::span<const double> v, std::size_t K,
                               linalg::ComplexMatrix& out) {
  const long long rows = static_cast<long long>(K);
#pragma omp parallel for schedule(static)
  for (long long m = 0; m < rows; ++m) {
    auto row = out.row(static_cast<std::size_t>(m));
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
  const std::size_t na = alphas.size(), ns = sizes.size();
  // Per-row maxima, then a serial max over rows: max is order independent.
  std::vector<double> per_row(a.rows() * na * ns, 0.0);
  const long long rows = static_cast<long long>(a.rows());
#pragma omp parallel for schedule(dynamic, 8)
  for (long long mi = 0; mi < rows; ++mi) {
    const std::size_t m = static_cast<std::size_t>(mi) + 1;
    double* slot = per_row.data() + (m - 1) * na * ns;
    for (std::size_t n = 1; n <= a.cols(); ++n) {
      const double v = std::abs(a(m - 1, n - 1));
      if (v == 0.0) continue;
      const double lmn = std::log(double(m) * double(n));
      for (std::size_t i = 0; i < na; ++i) {
        const double r = v * std::exp(alphas[i] * lmn);
        for (std::size_t s = 0; s < ns; ++s)
          if (m <= sizes[s] && n <= sizes[s] && r > slot[i * ns + s]) slot[i * ns + s] = r;
      }
    }
  }
  std::vector<std::vector<double>> out(na, std::vector<double>(ns, 0.0));
  for (std::size_t m = 0; m < a.rows(); ++m)
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t s = 0; s < ns; ++s) out[i][s] = std::max(out[i][s], per_row[(m * na + i) * ns + s]);
  return out;
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace parallel

bool parallel_available() {
#if defined(RIESZ_OSC_HAVE_OPENMP)
  return true;
#else
  return false;
#endif
}

Backend default_backend() { return parallel_available() ? Backend::parallel : Backend::reference; }

void set_threads(int n) {
#if defined(RIESZ_OSC_HAVE_OPENMP)
  static const int runtime_default = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : runtime_default);
#else
  (void)n;
#endif
}

int max_threads() {
#if defined(RIESZ_OSC_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void accumulate_weighted_outer(std::span<const cplx> w, std::span<const double> v, std::size_t K,
                               linalg::ComplexMatrix& out, Backend b) {
  if (b == Backend::parallel)
    parallel::accumulate_weighted_outer(w, v, K, out);
  else
    reference::accumulate_weighted_outer(w, v, K, out);
}

std::vector<std::vector<double>> weighted_max(const linalg::ComplexMatrix& a, std::span<const double> alphas,
                                              std::span<const std::size_t> sizes, Backend b) {
  return b == Backend::parallel ? parallel::weighted_max(a, alphas, sizes)
                                : reference::weighted_max(a, alphas, sizes);
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body, Backend b) {
  if (b == Backend::parallel)
    parallel::for_each_index(count, body);
  else
    reference::for_each_index(count, body);
}

void map_indices(std::size_t count, const std::function<double(std::size_t)>& f, std::span<double> out,
                 Backend b) {
  for_each_index(count, [&](std::size_t i) { out[i] = f(i); }, b);
}

}  // namespace riesz_osc::kernels
