// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "riesz_osc/linalg.hpp"

namespace riesz_osc::kernels {

/// Each kernel has a serial reference version and an OpenMP version. The two
/// produce bitwise identical results: parallel work is split over output rows
/// or independent indices, never over a reduction order.
enum class Backend { reference, parallel };

/// `parallel` when the library was built with OpenMP, else `reference`.
Backend default_backend();
bool parallel_available();

/// Bounds the OpenMP worker count; <= 0 restores the runtime default.
void set_threads(int n);
int max_threads();

/// out(m, n) += sum_q w[q] * v[q*K + m] * v[q*K + n] for m, n < K, where v holds
/// real basis values at Q nodes (row q = node q).
void accumulate_weighted_outer(std::span<const cplx> w, std::span<const double> v, std::size_t K,
                               linalg::ComplexMatrix& out, Backend b);

/// For each alpha, max over m, n <= L of |a(m-1, n-1)| * (m n)^alpha, for each
/// leading size L in `sizes`. Result is indexed [alpha][size].
std::vector<std::vector<double>> weighted_max(const linalg::ComplexMatrix& a, std::span<const double> alphas,
                                              std::span<const std::size_t> sizes, Backend b);

/// out[i] = f(i) for i < count. Exceptions thrown by f are rethrown on the
/// calling thread (the one from the smallest index wins).
void map_indices(std::size_t count, const std::function<double(std::size_t)>& f, std::span<double> out,
                 Backend b);

/// body(i) for i < count, each index independent.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body, Backend b);

// Serial reference versions, always available; the dispatchers above forward here
// for Backend::reference.
namespace reference {
void accumulate_weighted_outer(std::span<const cplx> w, std::span<const double> v, std::size_t K,
                               linalg::ComplexMatrix& out);
std::vector<std::vector<double>> weighted_max(const linalg::ComplexMatrix& a, std::span<const double> alphas,
                                              std::span<const std::size_t> sizes);
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);
}  // namespace reference

namespace parallel {
void accumulate_weighted_outer(std::span<const cplx> w, std::span<const double> v, std::size_t K,
                               linalg::ComplexMatrix& out);
std::vector<std::vector<double>> weighted_max(const linalg::ComplexMatrix& a, std::span<const double> alphas,
                                              std::span<const std::size_t> sizes);
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);
}  // namespace parallel

}  // namespace riesz_osc::kernels
