// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <sstream>

#include "riesz_osc/linalg.hpp"

namespace riesz_osc::linalg {

LuFactorization::LuFactorization(ComplexMatrix a, double pivot_threshold) : lu_(std::move(a)) {
  if (!lu_.square()) throw Error("LU factorization requires a square matrix");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double tol = pivot_threshold * one_norm(lu_);
  smallest_pivot_ = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    smallest_pivot_ = std::min(smallest_pivot_, best);
    if (best <= tol || best == 0.0) {
      std::ostringstream os;
      os << "matrix is singular to working precision: pivot " << best << " at column " << k;
      throw SingularMatrixError(os.str(), best);
    }
    if (p != k) {
      auto rk = lu_.row(k);
      auto rp = lu_.row(p);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    const cplx inv = 1.0 / lu_(k, k);
    auto rk = lu_.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = lu_.row(i);
      const cplx l = ri[k] * inv;
      ri[k] = l;
      if (l == cplx{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
}

std::vector<cplx> LuFactorization::solve(std::span<const cplx> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw Error("LU solve: right-hand side has the wrong length");
  std::vector<cplx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    auto ri = lu_.row(i);
    cplx s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    auto ri = lu_.row(i);
    cplx s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= ri[j] * x[j];
    x[i] = s / ri[i];
  }
  return x;
}

std::vector<cplx> LuFactorization::solve_adjoint(std::span<const cplx> b) const {
  // P A = L U  =>  A^* = U^* L^* P, so solve U^* y = b, L^* w = y, x = P^T w.
  const std::size_t n = size();
  if (b.size() != n) throw Error("LU solve: right-hand side has the wrong length");
  std::vector<cplx> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    y[i] /= std::conj(lu_(i, i));
    const cplx yi = y[i];
    auto ri = lu_.row(i);
    for (std::size_t j = i + 1; j < n; ++j) y[j] -= std::conj(ri[j]) * yi;
  }
  for (std::size_t i = n; i-- > 0;) {
    const cplx yi = y[i];
    auto ri = lu_.row(i);
    for (std::size_t j = 0; j < i; ++j) y[j] -= std::conj(ri[j]) * yi;
  }
  std::vector<cplx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
  return x;
}

ComplexMatrix LuFactorization::inverse() const {
  const std::size_t n = size();
  ComplexMatrix inv(n);
  std::vector<cplx> e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), cplx{});
    e[j] = 1.0;
    const auto col = solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

void LuFactorization::determinant(cplx& mantissa, long& exponent) const {
  mantissa = static_cast<double>(sign_);
  exponent = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    mantissa *= lu_(i, i);
    int e = 0;
    const double m = std::frexp(std::abs(mantissa), &e);
    if (m == 0.0) {
      exponent = 0;
      return;
    }
    mantissa = std::ldexp(1.0, -e) * mantissa;
    exponent += e;
  }
}

std::vector<cplx> solve(const ComplexMatrix& a, std::span<const cplx> b) {
  return LuFactorization(a).solve(b);
}

}  // namespace riesz_osc::linalg
