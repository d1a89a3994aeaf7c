// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "riesz_osc/spectral.hpp"

namespace riesz_osc::spectral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

bool complex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<std::size_t> sorted_order(const std::vector<cplx>& v) {
  std::vector<std::size_t> o(v.size());
  std::iota(o.begin(), o.end(), std::size_t{0});
  std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return complex_less(v[a], v[b]); });
  return o;
}

// Principal branch: arg in (-pi, pi], so a negative real w with a signed zero
// imaginary part still lands on arg = pi.
cplx principal_sqrt(cplx w) {
  if (w.imag() == 0.0) w = cplx(w.real(), 0.0);
  return std::sqrt(w);
}

std::vector<cplx> inverse_roots(const GalerkinOperator& op, cplx z) {
  std::vector<cplx> s(op.K);
  for (std::size_t k = 0; k < op.K; ++k) {
    const cplx w = z - op.model.mu(k + 1);
    if (w == cplx(0.0)) throw PoleError("B(z) evaluated at an unperturbed eigenvalue", z);
    s[k] = 1.0 / principal_sqrt(w);
  }
  return s;
}

}  // namespace

GalerkinOperator assemble(const OscillatorModel& model, const forms::PerturbationForm& form, std::size_t K,
                          kernels::Backend backend) {
  if (K == 0) throw Error("truncation size must be positive");
  GalerkinOperator op;
  op.model = model;
  op.form = form;
  op.K = K;
  op.b = forms::matrix_block(form, model, K, &op.info, backend);
  op.T = op.b.transpose();
  for (std::size_t n = 0; n < K; ++n) op.T(n, n) += model.mu(n + 1);
  return op;
}

std::size_t default_K(std::size_t N) { return std::max<std::size_t>(256, 8 * (N + 2)); }

double default_trust_tol(const forms::PerturbationForm& form) {
  if (std::holds_alternative<forms::Delta>(form.kind) || std::holds_alternative<forms::MultiDelta>(form.kind))
    return 1e-3;
  return 1e-8;
}

std::size_t SpectralResult::trusted_count() const {
  return static_cast<std::size_t>(std::count(trusted.begin(), trusted.end(), true));
}

std::vector<std::size_t> SpectralResult::disk_occupancy_failures() const {
  std::vector<std::size_t> bad;
  if (!certificate) return bad;
  for (std::size_t k = certificate->N + 2; k < disk_count.size(); ++k)
    if (disk_count[k] != 1) bad.push_back(k);
  return bad;
}

SpectralResult compute_spectrum(const GalerkinOperator& op, const std::optional<bounds::EnclosureCertificate>& cert,
                                const SpectrumOptions& opts) {
  const std::size_t K = op.K;
  if (K < 8) throw Error("compute_spectrum needs K >= 8");
  auto eig = linalg::eigendecompose(op.T, opts.eigen);
  const auto half = linalg::eigenvalues(op.T.leading(K / 2), opts.eigen.balance);

  SpectralResult r;
  r.K = K;
  const auto order = sorted_order(eig.values);
  r.eigenvalues.resize(K);
  r.right = linalg::ComplexMatrix(K, K);
  r.left = linalg::ComplexMatrix(K, K);
  r.condition.resize(K);
  r.biorthogonal.resize(K);
  r.mu = op.model.mu_range(K);
  for (std::size_t n = 0; n < K; ++n) {
    const std::size_t src = order[n];
    r.eigenvalues[n] = eig.values[src];
    r.condition[n] = eig.condition[src];
    r.biorthogonal[n] = eig.biorthogonal[src];
    for (std::size_t i = 0; i < K; ++i) {
      r.right(i, n) = eig.right(i, src);
      r.left(i, n) = eig.left(i, src);
    }
  }

  // Nearest neighbour in the K/2 spectrum; a half-size eigenvalue claimed by two
  // indices cannot vouch for either.
  const std::size_t H = K / 2;
  std::vector<std::size_t> match(H);
  std::vector<std::size_t> claims(half.size(), 0);
  for (std::size_t n = 0; n < H; ++n) {
    std::size_t best = 0;
    double bd = kInf;
    for (std::size_t j = 0; j < half.size(); ++j) {
      const double d = std::abs(r.eigenvalues[n] - half[j]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    match[n] = best;
    ++claims[best];
  }

  const double normT = linalg::frobenius_norm(op.T);
  r.convergence.assign(K, kInf);
  r.tolerance.assign(K, opts.trust_tol);
  r.trusted.assign(K, false);
  for (std::size_t n = 0; n < H; ++n) {
    if (claims[match[n]] == 1) r.convergence[n] = std::abs(r.eigenvalues[n] - half[match[n]]);
    const double rounding = kEps * normT * r.condition[n];
    if (opts.roundoff_floor) r.tolerance[n] = std::max(opts.trust_tol, rounding);
    r.trusted[n] = r.convergence[n] <= r.tolerance[n] && rounding <= opts.max_roundoff;
  }

  r.membership.assign(K, std::nullopt);
  if (cert) {
    r.certificate = *cert;
    r.disk_count.assign(H + 1, 0);
    // Everything up to the far edge of the disk around mu_{K/2}.
    const double limit = op.model.mu(H) + 0.5;
    for (std::size_t n = 0; n < H; ++n) {
      if (!r.trusted[n] || r.eigenvalues[n].real() >= limit) continue;
      const auto hit = bounds::region_contains(*cert, r.eigenvalues[n]);
      r.membership[n] = hit;
      if (!hit.inside)
        r.outside.push_back(n + 1);
      else if (hit.component == 0)
        ++r.rectangle_count;
      else if (hit.component <= H)
        ++r.disk_count[hit.component];
    }
  }
  return r;
}

linalg::ComplexMatrix b_of_z(const GalerkinOperator& op, cplx z) {
  const auto s = inverse_roots(op, z);
  linalg::ComplexMatrix out(op.K, op.K);
  for (std::size_t k = 0; k < op.K; ++k)
    for (std::size_t j = 0; j < op.K; ++j) out(k, j) = -op.b(j, k) * s[j] * s[k];
  return out;
}

double factorization_defect(const GalerkinOperator& op, cplx z) {
  const auto B = b_of_z(op, z);
  double worst = 0.0;
  for (std::size_t k = 0; k < op.K; ++k) {
    const cplx rk = principal_sqrt(z - op.model.mu(k + 1));
    for (std::size_t j = 0; j < op.K; ++j) {
      const cplx rj = principal_sqrt(z - op.model.mu(j + 1));
      const cplx lhs = rk * ((k == j ? 1.0 : 0.0) + B(k, j)) * rj;
      const cplx rhs = (k == j ? z : cplx(0.0)) - op.T(k, j);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

BAudit certify_B_bound(const GalerkinOperator& op, const bounds::EnclosureCertificate& cert,
                       const BAuditOptions& opts) {
  const std::size_t K = op.K;
  const std::size_t s = std::max<std::size_t>(opts.samples_per_arc, 1);
  BAudit audit;

  // Rectangle edges counterclockwise, both real-axis crossings, then the circles.
  const double h = cert.h, R = cert.right_edge;
  const cplx corners[4] = {{-h, -h}, {R, -h}, {R, h}, {-h, h}};
  for (int e = 0; e < 4; ++e) {
    audit.points.push_back({corners[e], 0});
    for (std::size_t i = 0; i < s; ++i) {
      const double t = (double(i) + 0.5) / double(s);
      audit.points.push_back({corners[e] + t * (corners[(e + 1) % 4] - corners[e]), 0});
    }
  }
  audit.points.push_back({cplx(R, 0.0), 0});
  audit.points.push_back({cplx(-h, 0.0), 0});
  const std::size_t first = opts.include_interior ? 1 : cert.N + 2;
  for (std::size_t n = first; n <= K / 2; ++n) {
    for (std::size_t j = 0; j < s; ++j) {
      const double th = 2.0 * kPi * double(j) / double(s);
      BAuditPoint p{op.model.mu(n) + 0.5 * std::polar(1.0, th), n};
      p.constrained = n > cert.N + 1;
      audit.points.push_back(p);
    }
  }

  std::vector<double> absb(K * K);
  for (std::size_t j = 0; j < K; ++j)
    for (std::size_t k = 0; k < K; ++k) absb[j * K + k] = std::abs(op.b(j, k));
  const double gamma = 2.0 * cert.alpha;
  std::vector<double> weight(K);
  for (std::size_t k = 0; k < K; ++k) weight[k] = std::pow(double(k + 1), -gamma);

  kernels::for_each_index(
      audit.points.size(),
      [&](std::size_t i) {
        BAuditPoint& p = audit.points[i];
        std::vector<double> a(K);
        double head = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          const double d = std::abs(p.z - op.model.mu(k + 1));
          a[k] = 1.0 / std::sqrt(d);
          head += weight[k] / d;
        }
        // |B_kj| = |b(j, k)| a_j a_k.
        double frob = 0.0;
        std::vector<double> col(K, 0.0);
        double row_max = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
          const double* bj = &absb[j * K];
          double row = 0.0;  // sum_k |B_kj|, column j of B(z)
          for (std::size_t k = 0; k < K; ++k) {
            const double e = bj[k] * a[k];
            row += e;
            frob += e * e * a[j] * a[j];
            col[k] += bj[k] * a[j];
          }
          row_max = std::max(row_max, row * a[j]);
        }
        double col_max = 0.0;
        for (std::size_t k = 0; k < K; ++k) col_max = std::max(col_max, col[k] * a[k]);
        p.block_bound = std::min(std::sqrt(frob), std::sqrt(row_max * col_max));
        // Outside the block |B_kj| <= M_b u_k u_j with u_k = k^{-a} |z - mu_k|^{-1/2};
        // the norm of uu^T minus its K x K corner is (t + sqrt(t^2 + 4 head t)) / 2.
        const double tail = bounds::tail_sum_bound(gamma, p.z, op.model, K);
        p.tail_bound = cert.M_b * 0.5 * (tail + std::sqrt(tail * tail + 4.0 * head * tail));
        p.total = p.block_bound + p.tail_bound;
      },
      opts.backend);

  for (const auto& p : audit.points) {
    if (p.constrained) {
      if (p.total >= audit.max_bound) {
        audit.max_bound = p.total;
        audit.worst_point = p.z;
      }
    } else {
      audit.interior_max = std::max(audit.interior_max, p.total);
    }
  }
  audit.worst_block_estimate = linalg::operator_norm(b_of_z(op, audit.worst_point));
  audit.passed = audit.max_bound <= 0.5 + 1e-9;
  return audit;
}

}  // namespace riesz_osc::spectral
