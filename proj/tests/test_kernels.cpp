// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "riesz_osc/forms.hpp"
#include "riesz_osc/kernels.hpp"
#include "support.hpp"

using namespace riesz_osc;
using kernels::Backend;

namespace {

bool identical(const linalg::ComplexMatrix& a, const linalg::ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

}  // namespace

TEST_CASE("weighted outer product: parallel equals reference bitwise") {
  for (int threads : {1, 2, 4}) {
    kernels::set_threads(threads);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    const std::size_t K = 57, Q = 301;
    std::vector<cplx> w(Q);
    std::vector<double> v(Q * K);
    for (auto& x : w) x = {g(rng), g(rng)};
    for (auto& x : v) x = g(rng);
    w[3] = 0.0;
    linalg::ComplexMatrix a(K), b(K);
    kernels::accumulate_weighted_outer(w, v, K, a, Backend::reference);
    kernels::accumulate_weighted_outer(w, v, K, b, Backend::parallel);
    CHECK(identical(a, b));
    // Against the plain triple loop.
    double d = 0.0;
    for (std::size_t m = 0; m < K; ++m)
      for (std::size_t n = 0; n < K; ++n) {
        cplx s = 0.0;
        for (std::size_t q = 0; q < Q; ++q) s += w[q] * v[q * K + m] * v[q * K + n];
        d = std::max(d, std::abs(s - a(m, n)));
      }
    CHECK(d < 1e-11);
  }
  kernels::set_threads(0);
}

TEST_CASE("weighted max: parallel equals reference") {
  const auto a = test_support::random_matrix(90, 3);
  const std::vector<double> alphas{0.0, 0.25, 0.5};
  const std::vector<std::size_t> sizes{10, 45, 90};
  const auto r = kernels::weighted_max(a, alphas, sizes, Backend::reference);
  const auto p = kernels::weighted_max(a, alphas, sizes, Backend::parallel);
  CHECK(r == p);
  double brute = 0.0;
  for (std::size_t m = 1; m <= 45; ++m)
    for (std::size_t n = 1; n <= 45; ++n) brute = std::max(brute, std::abs(a(m - 1, n - 1)) * std::sqrt(double(m * n)));
  CHECK(r[2][1] == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("index maps propagate the first failure") {
  std::vector<double> out(100);
  kernels::map_indices(100, [](std::size_t i) { return double(i * i); }, out, Backend::parallel);
  CHECK(out[9] == 81.0);
  auto body = [](std::size_t i) {
    if (i == 17 || i == 60) throw std::runtime_error("index " + std::to_string(i));
  };
  for (auto b : {Backend::reference, Backend::parallel}) {
    try {
      kernels::for_each_index(100, body, b);
      FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "index 17");
    }
  }
}

TEST_CASE("matrix blocks agree across backends") {
  const auto model = OscillatorModel::harmonic();
  const std::vector<forms::PerturbationForm> fs{
      {forms::MultiDelta{1.0, 0.5, {1.0, 0.2}, {}}},
      {forms::FunctionPotential{[](double x) { return cplx(std::exp(-x * x), x); }, 0, 0, {}, 1e-10, "gauss"}},
      {forms::Delta{{0.5, 0.3}, 0.0}},
  };
  for (const auto& f : fs) {
    const auto r = forms::matrix_block(f, model, 64, nullptr, Backend::reference);
    const auto p = forms::matrix_block(f, model, 64, nullptr, Backend::parallel);
    CHECK(identical(r, p));
  }
}
