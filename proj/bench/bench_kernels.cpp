// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts. The second
// benchmark argument selects the backend: 0 reference, 1 parallel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "riesz_osc/bounds.hpp"
#include "riesz_osc/forms.hpp"
#include "riesz_osc/kernels.hpp"
#include "riesz_osc/spectral.hpp"

namespace ro = riesz_osc;
using ro::kernels::Backend;

namespace {

Backend backend_of(const benchmark::State& s) { return s.range(1) == 0 ? Backend::reference : Backend::parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(1) == 0 ? "reference" : "parallel"); }

void BM_WeightedOuter(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const std::size_t Q = 2 * K;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<ro::cplx> w(Q);
  std::vector<double> v(Q * K);
  for (auto& x : w) x = {g(rng), g(rng)};
  for (auto& x : v) x = g(rng);
  for (auto _ : state) {
    ro::linalg::ComplexMatrix out(K, K);
    ro::kernels::accumulate_weighted_outer(w, v, K, out, backend_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_WeightedMax(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const auto block = ro::forms::matrix_block(ro::forms::PerturbationForm{ro::forms::Delta{1.0, 0.0}},
                                             ro::OscillatorModel::harmonic(), K);
  const std::vector<double> alphas{1.0 / 12, 1.0 / 8, 0.25, 0.5};
  const std::vector<std::size_t> sizes{K, K / 2, K / 4};
  for (auto _ : state) benchmark::DoNotOptimize(ro::kernels::weighted_max(block, alphas, sizes, backend_of(state)));
  label(state);
}

void BM_PotentialBlock(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  ro::forms::FunctionPotential v{[](double x) { return ro::cplx(0.0, 1.0) * std::abs(x); }, 0, 0, {0.0}, 1e-10, "i|x|"};
  for (auto _ : state)
    benchmark::DoNotOptimize(ro::forms::matrix_block(ro::forms::PerturbationForm{v}, ro::OscillatorModel::harmonic(),
                                                     K, nullptr, backend_of(state)));
  label(state);
}

void BM_BAudit(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const ro::forms::PerturbationForm f{ro::forms::Delta{{0.5, 0.3}, 0.0}};
  const auto model = ro::OscillatorModel::harmonic();
  const auto cert = ro::bounds::certify_enclosure(ro::forms::fit_envelope(f, model, 256), model);
  const auto op = ro::spectral::assemble(model, f, K);
  ro::spectral::BAuditOptions opts;
  opts.backend = backend_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(ro::spectral::certify_B_bound(op, cert, opts));
  label(state);
}

void BM_Contour(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const ro::forms::PerturbationForm f{ro::forms::Delta{{0.5, 0.3}, 0.0}};
  const auto model = ro::OscillatorModel::harmonic();
  const auto op = ro::spectral::assemble(model, f, K);
  const std::vector<ro::spectral::Circle> circles{{30, model.mu(30), 0.5}};
  for (auto _ : state) benchmark::DoNotOptimize(ro::spectral::projections_contour(op, circles, 16, backend_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_WeightedOuter)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedMax)->ArgsProduct({{256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PotentialBlock)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BAudit)->ArgsProduct({{128, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Contour)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
