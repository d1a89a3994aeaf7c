// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "../gauss.hpp"
#include "riesz_osc/spectral.hpp"

namespace riesz_osc::spectral {

namespace {

constexpr double kClusterGap = 1e-8;
constexpr double kCollision = 1e-6;

linalg::ComplexMatrix resolvent(const linalg::ComplexMatrix& T, cplx z) {
  linalg::ComplexMatrix a = -1.0 * T;
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += z;
  return linalg::LuFactorization(std::move(a)).inverse();
}

void axpy(linalg::ComplexMatrix& y, cplx s, const linalg::ComplexMatrix& x) {
  const std::size_t n = y.rows() * y.cols();
  cplx* yd = y.data();
  const cplx* xd = x.data();
  for (std::size_t i = 0; i < n; ++i) yd[i] += s * xd[i];
}

// Triangular factor of A = QR (A is rows x m, column-major in `cols`), by
// classical Gram-Schmidt with one reorthogonalisation pass.
linalg::ComplexMatrix qr_factor(std::vector<std::vector<cplx>> cols) {
  const std::size_t m = cols.size();
  linalg::ComplexMatrix R(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const cplx c = linalg::dot(cols[i], cols[j]);
        R(i, j) += c;
        for (std::size_t r = 0; r < cols[j].size(); ++r) cols[j][r] -= c * cols[i][r];
      }
    }
    const double nj = linalg::norm2(cols[j]);
    R(j, j) = nj;
    if (nj > 0.0)
      for (auto& x : cols[j]) x /= nj;
  }
  return R;
}

}  // namespace

cplx Projection::entry(std::size_t i, std::size_t j) const {
  if (matrix.rows() > 0) return matrix(i, j);
  return u[i] * std::conj(v[j]);
}

linalg::ComplexMatrix Projection::dense(std::size_t K) const {
  if (matrix.rows() > 0) return matrix;
  return linalg::outer(std::span<const cplx>(u.data(), K), std::span<const cplx>(v.data(), K));
}

const Projection* ProjectionSet::find(std::size_t n) const {
  for (const auto& p : projections)
    if (p.n == n) return &p;
  return nullptr;
}

ProjectionSet projections_eigvec(const SpectralResult& result, std::size_t N, const GalerkinOperator* op) {
  const std::size_t K = result.K;
  ProjectionSet set;
  set.route = ProjectionRoute::eigenvector;
  set.K = K;
  set.N = N;

  for (std::size_t n = N + 2; n <= K / 2; ++n) {
    if (!result.trusted[n - 1]) continue;
    for (std::size_t m = 0; m < K; ++m) {
      if (m == n - 1) continue;
      if (std::abs(result.eigenvalues[m] - result.eigenvalues[n - 1]) < kClusterGap) {
        std::ostringstream os;
        os << "eigenvalues " << n << " and " << m + 1 << " are closer than " << kClusterGap
           << " although index " << n << " exceeds N + 1 = " << N + 1;
        throw ClusterError(os.str());
      }
    }
    Projection p;
    p.n = n;
    p.lambda = result.eigenvalues[n - 1];
    p.u = result.right.column(n - 1);
    p.v = result.left.column(n - 1);
    p.norm = linalg::norm2(p.u) * linalg::norm2(p.v);
    set.projections.push_back(std::move(p));
  }

  for (std::size_t n = 1; n <= K; ++n) {
    const cplx l = result.eigenvalues[n - 1];
    const bool in_rect = result.certificate ? [&] {
      const auto hit = bounds::region_contains(*result.certificate, l);
      return hit.inside && hit.component == 0;
    }()
                                            : n <= N + 1;
    if (in_rect) set.S_members.push_back(n);
  }

  bool defective = false;
  for (std::size_t n : set.S_members) defective = defective || !result.biorthogonal[n - 1];
  if (defective && op != nullptr && result.certificate) {
    set.S = rectangle_projection(*op, *result.certificate).S;
    set.S_from_contour = true;
    set.S_rank = linalg::numerical_rank(set.S, 1e-6);
  } else {
    // S = U V^* with U = Q_u R_u and V = Q_v R_v, so S has the singular values
    // of the small matrix R_u R_v^*.
    std::vector<std::vector<cplx>> U, V;
    for (std::size_t n : set.S_members) {
      U.push_back(result.right.column(n - 1));
      V.push_back(result.left.column(n - 1));
    }
    set.S_rank = U.empty() ? 0 : linalg::numerical_rank(qr_factor(U) * qr_factor(V).adjoint(), 1e-6);
    set.S = linalg::ComplexMatrix(K, K);
    for (std::size_t n : set.S_members) {
      const cplx* base = result.right.data();
      for (std::size_t i = 0; i < K; ++i) {
        const cplx ri = base[i * K + (n - 1)];
        for (std::size_t j = 0; j < K; ++j) set.S(i, j) += ri * std::conj(result.left(j, n - 1));
      }
    }
  }
  return set;
}

ProjectionSet projections_contour(const GalerkinOperator& op, const std::vector<Circle>& circles,
                                  std::size_t quadrature_points, kernels::Backend backend) {
  const std::size_t q = quadrature_points;
  if (q < 4 || q % 2 != 0) throw Error("contour quadrature needs an even node count >= 4");
  const std::size_t K = op.K;
  const auto lambdas = linalg::eigenvalues(op.T);

  ProjectionSet set;
  set.route = ProjectionRoute::contour;
  set.K = K;
  set.projections.resize(circles.size());
  for (std::size_t c = 0; c < circles.size(); ++c) {
    const Circle& C = circles[c];
    std::size_t inside = 0;
    for (cplx l : lambdas) {
      const double d = std::abs(l - C.center);
      if (std::abs(d - C.radius) < kCollision) {
        std::ostringstream os;
        os << "eigenvalue " << l.real() << (l.imag() < 0 ? " - " : " + ") << std::abs(l.imag())
           << "i lies within " << kCollision << " of the contour around " << C.center.real();
        throw PoleError(os.str(), l);
      }
      if (d < C.radius) {
        set.projections[c].lambda = l;
        ++inside;
      }
    }
    if (inside != 1) set.projections[c].lambda = cplx(std::numeric_limits<double>::quiet_NaN());
    set.projections[c].n = C.n;
  }

  // Circles run concurrently; nodes within a circle accumulate in a fixed order.
  kernels::for_each_index(
      circles.size(),
      [&](std::size_t c) {
        const Circle& C = circles[c];
        linalg::ComplexMatrix full(K, K), half(K, K);
        for (std::size_t j = 0; j < q; ++j) {
          const cplx e = std::polar(1.0, 2.0 * kPi * double(j) / double(q));
          const auto Rz = resolvent(op.T, C.center + C.radius * e);
          axpy(full, C.radius * e / double(q), Rz);
          if (j % 2 == 0) axpy(half, 2.0 * C.radius * e / double(q), Rz);
        }
        Projection& p = set.projections[c];
        p.quadrature_error = linalg::operator_norm(full - half);
        p.norm = linalg::operator_norm(full);
        p.matrix = std::move(full);
      },
      backend);
  return set;
}

RectangleProjection rectangle_projection(const GalerkinOperator& op, const bounds::EnclosureCertificate& cert,
                                         const RectangleContourOptions& opts) {
  const std::size_t K = op.K;
  const double h = cert.h, R = cert.right_edge;
  const cplx corners[4] = {{-h, -h}, {R, -h}, {R, h}, {-h, h}};

  struct Panel {
    cplx a, b;
  };
  std::vector<Panel> panels;
  auto distance = [&](cplx z) {
    const std::size_t k = bounds::nearest_index(op.model, z.real());
    return std::abs(z - op.model.mu(k));
  };
  for (int e = 0; e < 4; ++e) {
    std::vector<Panel> todo{{corners[e], corners[(e + 1) % 4]}};
    while (!todo.empty()) {
      Panel p = todo.back();
      todo.pop_back();
      const double len = std::abs(p.b - p.a);
      const cplx mid = 0.5 * (p.a + p.b);
      if (len > std::max(opts.min_panel, opts.grading * distance(mid))) {
        todo.push_back({mid, p.b});
        todo.push_back({p.a, mid});
      } else {
        panels.push_back(p);
      }
    }
  }

  const auto& hi = detail::gauss_legendre(static_cast<int>(opts.order));
  const auto& lo = detail::gauss_legendre(static_cast<int>(std::max<std::size_t>(opts.order / 2, 1)));
  std::vector<cplx> z, w_hi, w_lo;
  for (const auto& p : panels) {
    const cplx mid = 0.5 * (p.a + p.b), half = 0.5 * (p.b - p.a);
    for (std::size_t i = 0; i < hi.x.size(); ++i) {
      z.push_back(mid + hi.x[i] * half);
      w_hi.push_back(hi.w[i] * half);
      w_lo.push_back(0.0);
    }
    for (std::size_t i = 0; i < lo.x.size(); ++i) {
      z.push_back(mid + lo.x[i] * half);
      w_hi.push_back(0.0);
      w_lo.push_back(lo.w[i] * half);
    }
  }

  // Panels are evaluated a chunk at a time and summed in panel order, so the
  // result does not depend on the backend or the thread count.
  RectangleProjection out;
  out.S = linalg::ComplexMatrix(K, K);
  linalg::ComplexMatrix S_lo(K, K);
  const cplx scale = 1.0 / (2.0 * kPi * cplx(0.0, 1.0));
  const std::size_t per = hi.x.size() + lo.x.size();
  const std::size_t chunk = static_cast<std::size_t>(std::max(1, kernels::max_threads()));
  for (std::size_t first = 0; first < panels.size(); first += chunk) {
    const std::size_t count = std::min(chunk, panels.size() - first);
    std::vector<linalg::ComplexMatrix> part_hi(count), part_lo(count);
    kernels::for_each_index(
        count,
        [&](std::size_t c) {
          const std::size_t pi = first + c;
          linalg::ComplexMatrix a(K, K), b(K, K);
          for (std::size_t i = pi * per; i < (pi + 1) * per; ++i) {
            const auto Rz = resolvent(op.T, z[i]);
            if (w_hi[i] != 0.0) axpy(a, w_hi[i], Rz);
            if (w_lo[i] != 0.0) axpy(b, w_lo[i], Rz);
          }
          part_hi[c] = std::move(a);
          part_lo[c] = std::move(b);
        },
        opts.backend);
    for (std::size_t c = 0; c < count; ++c) {
      axpy(out.S, scale, part_hi[c]);
      axpy(S_lo, scale, part_lo[c]);
    }
  }
  out.nodes = z.size();
  out.quadrature_error = linalg::operator_norm(out.S - S_lo);
  return out;
}

}  // namespace riesz_osc::spectral
