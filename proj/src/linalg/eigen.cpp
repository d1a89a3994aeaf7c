// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riesz_osc/linalg.hpp"

namespace riesz_osc::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Diagonal similarity D^{-1} A D with power-of-two entries so the scaling is exact.
std::vector<double> balance(ComplexMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<double> d(n, 1.0);
  constexpr double radix = 2.0;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += abs1(a(j, i));
        r += abs1(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / radix;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        d[i] *= f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  return d;
}

// Householder reduction to upper Hessenberg form; U accumulates the transformations.
void hessenberg(ComplexMatrix& h, ComplexMatrix* u) {
  const std::size_t n = h.rows();
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm = std::hypot(xnorm, std::abs(h(i, k)));
    if (xnorm == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
    const cplx alpha = -phase * xnorm;
    std::fill(v.begin(), v.end(), cplx{});
    for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
    v[k + 1] -= alpha;
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
    if (vnorm == 0.0) continue;
    const double tau = 2.0 / vnorm;

    // H <- (I - tau v v^*) H
    for (std::size_t j = k; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      s *= tau;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
    }
    // H <- H (I - tau v v^*)
    for (std::size_t i = 0; i < n; ++i) {
      auto hi = h.row(i);
      cplx s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += hi[j] * v[j];
      s *= tau;
      for (std::size_t j = k + 1; j < n; ++j) hi[j] -= s * std::conj(v[j]);
    }
    if (u) {
      for (std::size_t i = 0; i < n; ++i) {
        auto ui = u->row(i);
        cplx s = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) s += ui[j] * v[j];
        s *= tau;
        for (std::size_t j = k + 1; j < n; ++j) ui[j] -= s * std::conj(v[j]);
      }
    }
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

struct Givens {
  double c;
  cplx s;
};

// G = [[c, s], [-conj(s), c]] maps (a, b) to (r, 0).
Givens make_givens(cplx a, cplx b, cplx& r) {
  const double ab = std::abs(b);
  if (ab == 0.0) {
    r = a;
    return {1.0, 0.0};
  }
  const double aa = std::abs(a);
  if (aa == 0.0) {
    r = ab;
    return {0.0, std::conj(b) / ab};
  }
  const double nrm = std::hypot(aa, ab);
  const cplx phase = a / aa;
  r = phase * nrm;
  return {aa / nrm, phase * std::conj(b) / nrm};
}

void rotate_rows(ComplexMatrix& h, std::size_t p, std::size_t q, const Givens& g, std::size_t j0,
                 std::size_t j1) {
  auto rp = h.row(p);
  auto rq = h.row(q);
  for (std::size_t j = j0; j < j1; ++j) {
    const cplx x = rp[j];
    const cplx y = rq[j];
    rp[j] = g.c * x + g.s * y;
    rq[j] = -std::conj(g.s) * x + g.c * y;
  }
}

void rotate_cols(ComplexMatrix& h, std::size_t p, std::size_t q, const Givens& g, std::size_t i0,
                 std::size_t i1) {
  const cplx sc = std::conj(g.s);
  for (std::size_t i = i0; i < i1; ++i) {
    auto ri = h.row(i);
    const cplx x = ri[p];
    const cplx y = ri[q];
    ri[p] = g.c * x + sc * y;
    ri[q] = -g.s * x + g.c * y;
  }
}

// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
cplx wilkinson_shift(const ComplexMatrix& h, std::size_t iu) {
  const cplx a = h(iu - 1, iu - 1);
  const cplx b = h(iu - 1, iu);
  const cplx c = h(iu, iu - 1);
  const cplx d = h(iu, iu);
  const cplx t = 0.5 * (a + d);
  const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  cplx m1 = t + disc;
  cplx m2 = t - disc;
  // Recover the smaller root from the product when the sum cancels.
  const cplx det = a * d - b * c;
  if (std::abs(m1) >= std::abs(m2)) {
    if (std::abs(m1) > 0.0) m2 = det / m1;
  } else {
    m1 = det / m2;
  }
  return std::abs(m1 - d) <= std::abs(m2 - d) ? m1 : m2;
}

// Reduces upper Hessenberg H to upper triangular form in place by implicit
// single-shift QR. With `full` the whole Schur factor is maintained (needed for
// eigenvectors) and Z accumulates the rotations.
void schur(ComplexMatrix& h, ComplexMatrix* z, bool full, int per_eigenvalue) {
  const std::size_t n = h.rows();
  if (n == 0) return;
  const double hnorm = std::max(frobenius_norm(h), std::numeric_limits<double>::min());
  const long budget = static_cast<long>(per_eigenvalue) * static_cast<long>(n);
  long total = 0;
  int iter = 0;
  std::size_t iu = n - 1;

  while (iu > 0) {
    // Find the active block [il, iu].
    std::size_t il = iu;
    while (il > 0) {
      double s = abs1(h(il - 1, il - 1)) + abs1(h(il, il));
      if (s == 0.0) s = hnorm;
      if (abs1(h(il, il - 1)) <= kEps * s) {
        h(il, il - 1) = 0.0;
        break;
      }
      --il;
    }
    if (il == iu) {
      --iu;
      iter = 0;
      continue;
    }
    if (++total > budget) {
      std::vector<std::size_t> block;
      for (std::size_t i = il; i <= iu; ++i) block.push_back(i);
      std::ostringstream os;
      os << "QR iteration did not converge for block [" << il << ", " << iu << "]";
      throw ConvergenceError(os.str(), std::move(block));
    }
    ++iter;

    cplx shift;
    if (iter == 10 || iter == 30) {
      shift = std::abs(h(iu, iu - 1).real()) +
              (iu >= 2 ? std::abs(h(iu - 1, iu - 2).real()) : 0.0);
      shift += h(iu, iu);
    } else {
      shift = wilkinson_shift(h, iu);
    }

    const std::size_t col_end = full ? n : iu + 1;
    const std::size_t row_begin = full ? 0 : il;
    for (std::size_t k = il; k < iu; ++k) {
      cplx r;
      Givens g;
      if (k == il) {
        g = make_givens(h(il, il) - shift, h(il + 1, il), r);
        rotate_rows(h, k, k + 1, g, il, col_end);
      } else {
        g = make_givens(h(k, k - 1), h(k + 1, k - 1), r);
        h(k, k - 1) = r;
        h(k + 1, k - 1) = 0.0;
        rotate_rows(h, k, k + 1, g, k, col_end);
      }
      rotate_cols(h, k, k + 1, g, row_begin, std::min(k + 3, iu + 1));
      if (z) rotate_cols(*z, k, k + 1, g, 0, n);
    }
  }
}

}  // namespace

std::vector<cplx> eigenvalues(const ComplexMatrix& a, bool balance_first) {
  EigenOptions opts;
  opts.balance = balance_first;
  opts.compute_vectors = false;
  return eigendecompose(a, opts).values;
}

EigenDecomposition eigendecompose(const ComplexMatrix& a, const EigenOptions& opts) {
  if (!a.square()) throw Error("eigendecompose requires a square matrix");
  if (!a.all_finite()) throw Error("eigendecompose: matrix has non-finite entries");
  const std::size_t n = a.rows();
  EigenDecomposition out;
  if (n == 0) return out;

  ComplexMatrix t = a;
  std::vector<double> d(n, 1.0);
  if (opts.balance) d = balance(t);

  ComplexMatrix u;
  if (opts.compute_vectors) u = ComplexMatrix::identity(n);
  hessenberg(t, opts.compute_vectors ? &u : nullptr);
  schur(t, opts.compute_vectors ? &u : nullptr, opts.compute_vectors, opts.iterations_per_eigenvalue);

  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = t(i, i);
  if (!opts.compute_vectors) return out;

  const double tnorm = frobenius_norm(t);
  const double smin = std::max(kEps * tnorm, std::numeric_limits<double>::min() * 1e10);
  constexpr double big = 1e100;

  // Right eigenvectors of T by back substitution; column k of X.
  ComplexMatrix x(n);
  std::vector<cplx> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx lam = t(k, k);
    std::fill(w.begin(), w.end(), cplx{});
    w[k] = 1.0;
    for (std::size_t j = k; j-- > 0;) {
      cplx s = 0.0;
      auto tj = t.row(j);
      for (std::size_t i = j + 1; i <= k; ++i) s += tj[i] * w[i];
      cplx den = tj[j] - lam;
      if (std::abs(den) < smin) den = smin;
      w[j] = -s / den;
      if (std::abs(w[j]) > big) {
        for (std::size_t i = j; i <= k; ++i) w[i] /= big;
      }
    }
    for (std::size_t i = 0; i <= k; ++i) x(i, k) = w[i];
  }

  // Left eigenvectors: solve (T^* - conj(lam)) y = 0 forward; column k of Y.
  ComplexMatrix y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx lamc = std::conj(t(k, k));
    std::fill(w.begin(), w.end(), cplx{});
    w[k] = 1.0;
    for (std::size_t j = k + 1; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t i = k; i < j; ++i) s += std::conj(t(i, j)) * w[i];
      cplx den = std::conj(t(j, j)) - lamc;
      if (std::abs(den) < smin) den = smin;
      w[j] = -s / den;
      if (std::abs(w[j]) > big) {
        for (std::size_t i = k; i <= j; ++i) w[i] /= big;
      }
    }
    for (std::size_t i = k; i < n; ++i) y(i, k) = w[i];
  }

  // Back to the original basis: r = D U x, l = D^{-1} U y.
  ComplexMatrix r = u * x;
  ComplexMatrix l = u * y;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      r(i, k) *= d[i];
      l(i, k) /= d[i];
    }
  }

  out.residuals.resize(n);
  out.condition.resize(n);
  out.biorthogonal.resize(n);
  std::vector<cplx> rc(n), lc(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      rc[i] = r(i, k);
      lc[i] = l(i, k);
    }
    const double rn = norm2(rc);
    const double ln = norm2(lc);
    for (auto& v : rc) v /= rn;
    for (auto& v : lc) v /= ln;
    const cplx s = dot(lc, rc);
    // |l^* r| for unit vectors is 1/kappa; below 1e-10 the pair is treated as
    // defective or numerically clustered.
    const bool ok = std::abs(s) > 1e-10;
    out.biorthogonal[k] = ok;
    out.condition[k] = ok ? 1.0 / std::abs(s) : std::numeric_limits<double>::infinity();
    if (ok) {
      const cplx scale = 1.0 / std::conj(s);
      for (auto& v : lc) v *= scale;
    }
    for (std::size_t i = 0; i < n; ++i) {
      r(i, k) = rc[i];
      l(i, k) = lc[i];
    }
    const auto av = multiply(a, rc);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(av[i] - out.values[k] * rc[i]);
    out.residuals[k] = std::sqrt(res);
  }
  out.right = std::move(r);
  out.left = std::move(l);
  return out;
}

}  // namespace riesz_osc::linalg
