// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "riesz_osc/spectral.hpp"

using namespace riesz_osc;
using namespace riesz_osc::spectral;

namespace {

const OscillatorModel kHarmonic = OscillatorModel::harmonic();

forms::PerturbationForm delta(cplx nu) { return {forms::Delta{nu, 0.0}}; }
forms::PerturbationForm linear(cplx c) { return {forms::TridiagonalLinear{c}}; }

SpectrumOptions trust(double tol) {
  SpectrumOptions o;
  o.trust_tol = tol;
  return o;
}

struct DeltaSetup {
  forms::EnvelopeFit fit;
  bounds::EnclosureCertificate cert;
};

const DeltaSetup& delta_setup() {
  static const DeltaSetup s = [] {
    DeltaSetup d;
    d.fit = forms::fit_envelope(delta({0.5, 0.3}), kHarmonic, 256);
    d.cert = bounds::certify_enclosure(d.fit, kHarmonic);
    return d;
  }();
  return s;
}

double max_abs(const linalg::ComplexMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

}  // namespace

TEST_CASE("assemble: diagonal, point interaction and linear potential entries") {
  const auto zero = assemble(kHarmonic, delta(0.0), 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) CHECK(zero.T(i, j) == (i == j ? cplx(2.0 * i + 1.0) : cplx(0.0)));

  const auto d = assemble(kHarmonic, delta(1.0), 4);
  const double h0 = std::pow(kPi, -0.25), h2 = -1.0 / (std::sqrt(2.0) * std::pow(kPi, 0.25));
  CHECK(std::abs(d.T(0, 0) - (1.0 + 1.0 / std::sqrt(kPi))) < 1e-14);
  CHECK(d.T(0, 1) == cplx(0.0));
  CHECK(std::abs(d.T(0, 2) - h0 * h2) < 1e-14);
  for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(d.T(n, n) - kHarmonic.mu(n + 1) - d.b(n, n)) < 1e-15);

  const auto t = assemble(kHarmonic, linear({0.0, 2.0}), 3);
  CHECK(std::abs(t.T(0, 1) - cplx(0.0, std::sqrt(2.0))) < 1e-14);
  CHECK(std::abs(t.T(1, 2) - cplx(0.0, 2.0)) < 1e-14);
  CHECK(t.T(0, 2) == cplx(0.0));
}

TEST_CASE("compute_spectrum: unperturbed levels are exact and trusted") {
  const auto r = compute_spectrum(assemble(kHarmonic, delta(0.0), 32));
  for (std::size_t n = 1; n <= 32; ++n) CHECK(r.eigenvalues[n - 1] == cplx(2.0 * n - 1.0));
  for (std::size_t n = 1; n <= 16; ++n) CHECK(r.trusted[n - 1]);
  for (std::size_t n = 17; n <= 32; ++n) {
    CHECK_FALSE(r.trusted[n - 1]);
    CHECK(std::isinf(r.convergence[n - 1]));
  }
  CHECK_THROWS_AS(compute_spectrum(assemble(kHarmonic, delta(1.0), 4)), Error);
}

TEST_CASE("compute_spectrum: odd Hermite levels are untouched by a centred point interaction") {
  for (cplx nu : {cplx(1.0), cplx(0.0, 10.0), cplx(0.5, 0.3)}) {
    const auto r = compute_spectrum(assemble(kHarmonic, delta(nu), 64), std::nullopt, trust(1e-3));
    for (std::size_t j = 1; j <= 32; ++j) {
      const double level = 4.0 * j - 1.0;
      double best = 1e9;
      for (cplx l : r.eigenvalues) best = std::min(best, std::abs(l - level));
      CHECK(best < 1e-10);
    }
  }
}

TEST_CASE("compute_spectrum: trusted eigenvalues are stable across three sizes") {
  const auto f = delta({0.5, 0.3});
  const auto a = compute_spectrum(assemble(kHarmonic, f, 64), std::nullopt, trust(2e-3));
  const auto b = compute_spectrum(assemble(kHarmonic, f, 128), std::nullopt, trust(2e-3));
  const auto c = compute_spectrum(assemble(kHarmonic, f, 256), std::nullopt, trust(2e-3));
  for (std::size_t n = 1; n <= 32; ++n) {
    if (!a.trusted[n - 1]) continue;
    CHECK(std::abs(a.eigenvalues[n - 1] - b.eigenvalues[n - 1]) <= a.tolerance[n - 1]);
    CHECK(std::abs(a.eigenvalues[n - 1] - c.eigenvalues[n - 1]) <= 2.0 * a.tolerance[n - 1]);
  }
  CHECK(a.trusted_count() > 20);
}

TEST_CASE("compute_spectrum: membership in the certified region") {
  const auto& s = delta_setup();
  const auto r = compute_spectrum(assemble(kHarmonic, delta({0.5, 0.3}), 128), s.cert, trust(2e-3));
  CHECK(r.outside.empty());
  CHECK(r.disk_occupancy_failures().empty());
  CHECK(r.rectangle_count == s.cert.N + 1);
  for (std::size_t n = s.cert.N + 2; n <= 64; ++n) {
    if (!r.trusted[n - 1]) continue;
    CHECK(std::abs(r.eigenvalues[n - 1] - kHarmonic.mu(n)) < 0.5);
  }
}

TEST_CASE("b_of_z: zero form, poles, branch and factorization") {
  CHECK(max_abs(b_of_z(assemble(kHarmonic, delta(0.0), 8), {2.0, 1.0})) == 0.0);
  const auto op = assemble(kHarmonic, delta(1.0), 8);
  CHECK_THROWS_AS(b_of_z(op, 5.0), PoleError);

  // Left of the spectrum both roots are imaginary and B(0) = b / sqrt(mu_j mu_k).
  const auto B0 = b_of_z(op, 0.0);
  for (std::size_t k = 0; k < 8; ++k)
    for (std::size_t j = 0; j < 8; ++j) {
      const double expect = op.b(j, k).real() / std::sqrt(kHarmonic.mu(j + 1) * kHarmonic.mu(k + 1));
      CHECK(std::abs(B0(k, j) - expect) < 1e-15);
      CHECK(std::abs(B0(k, j) - B0(j, k)) < 1e-16);
    }
  CHECK(max_abs(b_of_z(op, cplx(-2.0, -0.0)) - b_of_z(op, cplx(-2.0, 0.0))) == 0.0);

  const auto op2 = assemble(kHarmonic, delta({0.5, 0.3}), 16);
  for (cplx z : {cplx(0.0), cplx(-3.0), cplx(4.0, 0.0), cplx(10.0, -2.5), cplx(30.5, 0.1)})
    CHECK(factorization_defect(op2, z) < 1e-12);
}

TEST_CASE("certify_B_bound: certified region passes, interior is only recorded") {
  const auto& s = delta_setup();
  const auto op = assemble(kHarmonic, delta({0.5, 0.3}), 128);
  const auto audit = certify_B_bound(op, s.cert);
  CHECK(audit.passed);
  CHECK(audit.max_bound <= 0.5);
  CHECK(audit.worst_block_estimate <= audit.max_bound);
  CHECK(audit.interior_max > 0.5);
  bool saw_interior = false;
  for (const auto& p : audit.points) saw_interior = saw_interior || !p.constrained;
  CHECK(saw_interior);

  const auto weak = delta(1e-6);
  const auto fit = forms::fit_envelope(weak, kHarmonic, 64);
  const auto cert = bounds::certify_enclosure(fit, kHarmonic);
  const auto tiny = certify_B_bound(assemble(kHarmonic, weak, 64), cert);
  CHECK(tiny.passed);
  CHECK(tiny.max_bound < 1e-5);

  // A stronger coupling than the certificate was made for breaks the audit.
  const auto strong = certify_B_bound(assemble(kHarmonic, delta(4.0), 128), s.cert);
  CHECK_FALSE(strong.passed);
}

TEST_CASE("projections_eigvec: coordinate projections without perturbation") {
  const auto r = compute_spectrum(assemble(kHarmonic, delta(0.0), 16));
  const auto set = projections_eigvec(r, 1);
  CHECK(set.projections.size() == 6);
  for (const auto& p : set.projections) {
    CHECK(std::abs(p.norm - 1.0) < 1e-14);
    const auto P = p.dense(16);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j)
        CHECK(std::abs(P(i, j) - (i == j && i == p.n - 1 ? 1.0 : 0.0)) < 1e-14);
  }
  CHECK(set.S_rank == 2);
}

TEST_CASE("projections_eigvec: idempotent, mutually annihilating, rank of S") {
  const auto& s = delta_setup();
  const auto op = assemble(kHarmonic, delta({0.5, 0.3}), 128);
  const auto r = compute_spectrum(op, s.cert, trust(2e-3));
  const auto set = projections_eigvec(r, s.cert.N, &op);
  CHECK(set.S_rank == s.cert.N + 1);
  CHECK(set.S_members.size() == s.cert.N + 1);
  CHECK_FALSE(set.S_from_contour);
  const auto P = set.projections.front().dense(128);
  const auto Q = set.projections.back().dense(128);
  CHECK(max_abs(P * P - P) < 1e-8);
  CHECK(max_abs(P * Q) < 1e-8);
  CHECK(max_abs(set.S * set.S - set.S) < 1e-8);
  CHECK(max_abs(set.S * P) < 1e-8);
}

TEST_CASE("projections_eigvec: clustered eigenvalues above N + 1 are rejected") {
  SpectralResult r;
  r.K = 8;
  r.eigenvalues = {1, 3, 5, 7, 7, 11, 13, 15};
  r.right = linalg::ComplexMatrix::identity(8);
  r.left = linalg::ComplexMatrix::identity(8);
  r.condition.assign(8, 1.0);
  r.biorthogonal.assign(8, true);
  r.trusted = {true, true, true, true, false, false, false, false};
  CHECK_THROWS_AS(projections_eigvec(r, 1), ClusterError);
  CHECK_NOTHROW(projections_eigvec(r, 3));
}

TEST_CASE("projections_contour: exactness, empty contours, collisions") {
  const auto zero = assemble(kHarmonic, delta(0.0), 12);
  const auto set = projections_contour(zero, {{3, 5.0, 0.5}}, 32);
  const auto& P = set.projections[0].matrix;
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) CHECK(std::abs(P(i, j) - (i == j && i == 2 ? 1.0 : 0.0)) < 1e-12);
  const auto empty = projections_contour(zero, {{0, 2.0, 0.5}});
  CHECK(max_abs(empty.projections[0].matrix) < 1e-12);
  CHECK(std::isnan(empty.projections[0].lambda.real()));
  CHECK_THROWS_AS(projections_contour(zero, {{1, 1.0, 2.0}}, 32), PoleError);
  CHECK_THROWS_AS(projections_contour(zero, {{1, 1.0, 0.5}}, 31), Error);
}

TEST_CASE("projections_contour: agrees with the eigenvector route") {
  const auto& s = delta_setup();
  const auto op = assemble(kHarmonic, delta({0.5, 0.3}), 64);
  const auto r = compute_spectrum(op, s.cert, trust(2e-3));
  const auto eig = projections_eigvec(r, s.cert.N, &op);
  std::vector<Circle> circles;
  for (const auto& p : eig.projections) circles.push_back({p.n, kHarmonic.mu(p.n), 0.5});
  const auto con = projections_contour(op, circles);
  for (const auto& c : con.projections) {
    CHECK(c.quadrature_error < 1e-10);
    CHECK(linalg::operator_norm(c.matrix - eig.find(c.n)->dense(64)) < 1e-6);
    CHECK(std::abs(c.lambda - eig.find(c.n)->lambda) < 1e-10);
  }
}

TEST_CASE("rectangle_projection: matches the sum of rank-one projections") {
  const auto& s = delta_setup();
  const auto op = assemble(kHarmonic, delta({0.5, 0.3}), 40);
  const auto r = compute_spectrum(op, s.cert, trust(1e-2));
  const auto eig = projections_eigvec(r, s.cert.N, &op);
  const auto rect = rectangle_projection(op, s.cert);
  CHECK(rect.quadrature_error < 1e-8);
  CHECK(max_abs(rect.S - eig.S) < 1e-8);
  CHECK(std::abs(linalg::trace(rect.S) - double(s.cert.N + 1)) < 1e-8);
}

TEST_CASE("kato_check: zero perturbation and a hand-computed 2 x 2 similarity") {
  const auto r = compute_spectrum(assemble(kHarmonic, delta(0.0), 32));
  const auto zero = kato_check(projections_eigvec(r, 1), 4, 50);
  CHECK(zero.c0_estimate == 0.0);

  // W = [[1, t], [0, 1]]: Q_1 = [[1, -t], [0, 0]], Q_2 = [[0, t], [0, 1]].
  const double t = 0.7;
  ProjectionSet set;
  set.K = 2;
  set.route = ProjectionRoute::contour;
  Projection q1, q2;
  q1.n = 1;
  q1.matrix = linalg::ComplexMatrix(2, 2);
  q1.matrix(0, 0) = 1.0;
  q1.matrix(0, 1) = -t;
  q2.n = 2;
  q2.matrix = linalg::ComplexMatrix(2, 2);
  q2.matrix(0, 1) = t;
  q2.matrix(1, 1) = 1.0;
  set.projections = {q1, q2};
  const auto rep = kato_check(set, 1, 500);
  CHECK(std::abs(rep.c0_operator - t * t) < 1e-14);
  CHECK(rep.c0_sampled <= rep.c0_operator + 1e-15);
  CHECK(rep.c0_sampled > 0.5 * t * t);
  CHECK(rep.per_n[0].row_norm_sq == doctest::Approx(t * t));
  CHECK(rep.per_n[1].row_norm_sq == 0.0);
}

TEST_CASE("kato_check: the point interaction satisfies the criterion") {
  const auto& s = delta_setup();
  const auto op = assemble(kHarmonic, delta({0.5, 0.3}), 128);
  const auto r = compute_spectrum(op, s.cert, trust(2e-3));
  const auto set = projections_eigvec(r, s.cert.N, &op);
  const auto rep = find_kato_N_star(set, 32, 200);
  CHECK(rep.c0_estimate <= 0.5);
  CHECK(rep.N_star <= 32);
  CHECK(rep.c0_operator >= rep.c0_sampled);
  double frobenius_sq = 0.0;
  for (const auto& t : rep.per_n) frobenius_sq += t.row_norm_sq;
  CHECK(rep.c0_operator <= frobenius_sq * (1.0 + 1e-12));
}

TEST_CASE("projection_growth: unperturbed norms and the linear counterexample") {
  const auto flat = projection_growth(assemble(kHarmonic, delta(0.0), 64), 2, 20);
  CHECK(flat.slope == 0.0);
  for (const auto& row : flat.rows) CHECK(row.norm == doctest::Approx(1.0));

  const auto op = assemble(kHarmonic, linear({0.0, 2.0}), 256);
  const auto r = compute_spectrum(op);
  const auto g = projection_growth(r, 10, 30);
  CHECK(g.slope >= 2.3);
  CHECK(g.slope <= 3.3);
  for (std::size_t n = 1; n <= 128; ++n)
    if (r.trusted[n - 1]) CHECK(std::abs(r.eigenvalues[n - 1] - 2.0 * n) < 1e-6);
  CHECK_THROWS_AS(projection_growth(r, 10, 120), UntrustedIndexError);
}

TEST_CASE("radius_decay_fit: zero, point interaction and a rank-one raw matrix") {
  forms::EnvelopeFit quarter;
  quarter.M_b = 1.0;
  quarter.alpha = 0.25;
  const auto zero = radius_decay_fit(compute_spectrum(assemble(kHarmonic, delta(0.0), 64)), quarter);
  CHECK(zero.degenerate_zero);

  const auto r = compute_spectrum(assemble(kHarmonic, delta({0.5, 0.3}), 256), std::nullopt, trust(1e-3));
  const auto d = radius_decay_fit(r, quarter, 27);
  CHECK(d.log_corrected);
  CHECK(d.exponent <= -0.4);
  CHECK(d.points >= 8);

  const std::size_t K = 128;
  linalg::ComplexMatrix e(K, K);
  for (std::size_t m = 1; m <= K; ++m)
    for (std::size_t n = 1; n <= K; ++n) e(m - 1, n - 1) = 1.0 / double(m * n);
  const forms::PerturbationForm raw{forms::RawMatrix(e, 1.0, 1.0)};
  const auto rr = compute_spectrum(assemble(kHarmonic, raw, K), std::nullopt, trust(1e-6));
  const auto fit = forms::declared_envelope(std::get<forms::RawMatrix>(raw.kind));
  const auto dr = radius_decay_fit(rr, fit);
  CHECK_FALSE(dr.log_corrected);
  CHECK(dr.exponent <= -0.9);

  // At K = 16 at most six indices 3..8 can be trusted.
  const auto few = compute_spectrum(assemble(kHarmonic, raw, 16), std::nullopt, trust(1e-2));
  CHECK_THROWS_AS(radius_decay_fit(few, fit), Error);
}
