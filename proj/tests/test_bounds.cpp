// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/sums_values.inc"
#include "riesz_osc/bounds.hpp"

using namespace riesz_osc;
using namespace riesz_osc::bounds;

namespace {

const OscillatorModel kUnit = OscillatorModel::table({1.0}, 1.0);
const OscillatorModel kHarmonic = OscillatorModel::harmonic();

forms::EnvelopeFit envelope(double M_b, double alpha) {
  forms::EnvelopeFit f;
  f.M_b = M_b;
  f.alpha = alpha;
  return f;
}

// sup over sampled points of |z - mu_n| = 1/2 of sum_k k^-g / |mu_k - z|, k <= terms.
double sampled_circle_sum(double gamma, std::size_t n, const OscillatorModel& m, std::size_t terms) {
  double best = 0.0;
  for (int i = 0; i < 64; ++i) {
    const cplx z = m.mu(n) + std::polar(0.5, 2.0 * kPi * i / 64.0);
    double s = 0.0;
    for (std::size_t k = 1; k <= terms; ++k) s += std::pow(double(k), -gamma) / std::abs(m.mu(k) - z);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

TEST_CASE("sigma and tau") {
  CHECK(sigma(2.0, 10.0) == doctest::Approx(0.1));
  CHECK(sigma(1.0, std::exp(1.0)) == doctest::Approx(std::exp(-1.0)));
  CHECK(sigma(0.5, 100.0) == doctest::Approx(0.460517).epsilon(1e-6));
  CHECK(tau(2.0, 10.0) == doctest::Approx(0.1));
  CHECK(tau(1.0, std::exp(1.0)) == doctest::Approx(std::exp(-1.0)));
  CHECK(tau(0.5, 4.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(sigma(0.5, 1.0), Error);
  CHECK_THROWS_AS(tau(0.5, 1.0), Error);
  CHECK_THROWS_AS(sigma(0.0, 3.0), Error);
}

TEST_CASE("log n / n^beta <= 1/(beta e)") {
  int violations = 0;
  for (double beta : {0.1, 0.5, 1.0, 2.0})
    for (int n = 2; n <= 200000; ++n)
      if (std::log(n) / std::pow(n, beta) > 1.0 / (beta * std::exp(1.0))) ++violations;
  CHECK(violations == 0);
}

TEST_CASE("explicit constants dominate brute-force sums") {
  for (double g : {0.1, 0.3, 0.5, 1.0, 1.5, 2.0, 5.0}) CHECK(explicit_C(g) >= 2.0);
  for (const auto& row : kCircleSums) {
    CAPTURE(row.gamma);
    CAPTURE(row.n);
    CHECK(row.sup <= explicit_C(row.gamma) * sigma(row.gamma, row.n));
  }
  for (const auto& row : kShiftSums) {
    CAPTURE(row.gamma);
    CAPTURE(row.h);
    REQUIRE(row.h >= explicit_D_min_h(row.gamma));
    CHECK(row.sum <= explicit_D(row.gamma) * tau(row.gamma, row.h));
  }
  SUBCASE("at gamma = 1 the shift sum does not vanish as h -> 1") {
    double s = 0.0;
    for (int k = 1; k < 1000000; ++k) s += 1.0 / (k * (k + 1.001));
    CHECK(s > explicit_D(1.0) * std::log(1.001) / 1.001);
  }
}

TEST_CASE("generic single-n bound folds into C sigma") {
  for (double g : {0.2, 0.5, 0.9, 1.0, 1.1, 2.0, 3.0})
    for (std::size_t n = 2; n <= 100000; n = n < 100 ? n + 1 : n * 11 / 10) {
      CAPTURE(g);
      CAPTURE(n);
      CHECK(generic_sum_bound(g, n) <= explicit_C(g) * sigma(g, double(n)) * (1 + 1e-14));
    }
}

TEST_CASE("certified sum bounds") {
  SUBCASE("between the brute-force supremum and C sigma") {
    for (const auto& row : kCircleSums) {
      if (row.n > 5000) continue;
      const auto c = certified_sum_bound(row.gamma, std::size_t(row.n), kUnit);
      CAPTURE(row.gamma);
      CAPTURE(row.n);
      CHECK(c.total >= row.sup * (1 - 1e-12));
      CHECK(c.total <= explicit_C(row.gamma) * sigma(row.gamma, row.n));
      CHECK(c.total == c.partial_sum + c.tail_bound);
      const double b = blocked_sum_bound(row.gamma, std::size_t(row.n), kUnit);
      CHECK(b >= row.sup * (1 - 1e-12));
    }
  }
  SUBCASE("gamma = 2, n = 2 against a million-term sum") {
    const auto c = certified_sum_bound(2.0, 2, kUnit);
    CHECK(c.total >= sampled_circle_sum(2.0, 2, kUnit, 1000000));
  }
  SUBCASE("harmonic spectrum, sampled circle") {
    for (double g : {0.5, 2.0})
      for (std::size_t n : {2u, 7u, 40u, 300u}) CHECK(certified_sum_bound(g, n, kHarmonic).total >= sampled_circle_sum(g, n, kHarmonic, 200000));
  }
  SUBCASE("gamma = 2: n * total stays bounded") {
    for (std::size_t n : {10u, 100u, 1000u, 10000u}) CHECK(double(n) * certified_sum_bound(2.0, n, kUnit).total <= explicit_C(2.0));
  }
  SUBCASE("total decreases in n") {
    for (double g : {0.5, 2.0}) {
      double prev = certified_sum_bound(g, 3, kUnit).total;
      for (std::size_t n = 4; n <= 10000; n += (n < 2000 ? 1 : 97)) {
        const double t = certified_sum_bound(g, n, kUnit).total;
        CHECK_MESSAGE(t < prev, n);
        prev = t;
      }
    }
  }
  SUBCASE("unnormalized models are rejected") {
    CHECK_THROWS_AS(certified_sum_bound(0.5, 3, OscillatorModel::table({1.0, 1.5}, 1.0)), Error);
  }
}

TEST_CASE("select_N") {
  CHECK(select_N(envelope(1e-12, 0.25), kHarmonic) == 1);
  CHECK(select_N(envelope(0.0, 0.25), kUnit) == 1);

  SUBCASE("against the brute-force scan") {
    const auto Nu = select_N(envelope(1.0, 0.25), kUnit);
    const auto Nh = select_N(envelope(1.0, 0.25), kHarmonic);
    CHECK(Nu >= std::size_t(kBruteN_unit));
    CHECK(double(Nu) <= 1.1 * kBruteN_unit);
    CHECK(Nh >= std::size_t(kBruteN_harmonic));
    CHECK(double(Nh) <= 1.1 * kBruteN_harmonic);
  }
  SUBCASE("defining inequality re-evaluated") {
    for (double mb : {0.2, 0.6}) {
      const auto fit = envelope(mb, 0.25);
      const auto N = select_N(fit, kHarmonic);
      if (N > 1) CHECK(mb * certified_sum_bound(0.5, N, kHarmonic).total > 0.5);
      for (std::size_t n = N + 1; n <= N + 300; ++n) CHECK(mb * certified_sum_bound(0.5, n, kHarmonic).total <= 0.5);
    }
  }
  SUBCASE("doubling M_b never decreases N") {
    for (double alpha : {0.25, 0.5, 1.0}) {
      std::size_t prev = 0;
      for (double mb = 0.02; mb < 1.0; mb *= 2) {
        const auto N = select_N(envelope(mb, alpha), kUnit);
        CHECK(N >= prev);
        prev = N;
      }
    }
  }
  SUBCASE("weak envelopes hit the search cap") {
    CHECK_THROWS_AS(select_N(envelope(50.0, 1.0 / 24), kHarmonic), SearchLimitError);
  }
}

TEST_CASE("select_h") {
  CHECK(select_h(envelope(1e-12, 0.25), 3) == doctest::Approx(1.001));
  CHECK(select_h(envelope(1.0, 0.25), 10) == doctest::Approx(kScanH_N10).epsilon(1e-12));
  CHECK(select_h(envelope(1.0, 0.25), 100) == doctest::Approx(kScanH_N100).epsilon(1e-12));
  CHECK(select_h(envelope(1.0, 0.25), 1000) == doctest::Approx(kScanH_N1000).epsilon(1e-12));
  for (double alpha : {0.25, 0.5, 0.75}) {
    double prev = 1e300;
    for (double mb = 2.0; mb > 1e-3; mb /= 2) {
      const auto fit = envelope(mb, alpha);
      const double h = select_h(fit, 20);
      CHECK(h <= prev);
      prev = h;
      CHECK(h_condition(fit, 20, h) <= 0.5);
      if (h - 1e-3 >= explicit_D_min_h(2 * alpha) && h > 1.0011) CHECK(h_condition(fit, 20, h - 1e-3) > 0.5);
    }
  }
  // 2 alpha = 1 uses the restricted range of D(1).
  CHECK(select_h(envelope(1e-9, 0.5), 3) >= 1.5);
}

TEST_CASE("enclosure certificate and region") {
  const auto fit = envelope(std::abs(cplx(0.5, 0.3)) / std::sqrt(kPi), 0.25);
  const auto cert = certify_enclosure(fit, kHarmonic);
  CHECK(cert.audit_passed());
  CHECK(cert.boundary_audit.size() > 100);
  CHECK(cert.right_edge == kHarmonic.mu(cert.N + 1) + 0.5);
  CHECK(verify_certificate(cert).empty());

  const std::size_t k = cert.N + 5;
  auto hit = region_contains(cert, kHarmonic.mu(k));
  CHECK(hit.inside);
  CHECK(hit.component == k);
  CHECK_FALSE(region_contains(cert, kHarmonic.mu(k) + 0.5).inside);
  CHECK_FALSE(region_contains(cert, cplx(-cert.h - 1.0, 0.0)).inside);
  hit = region_contains(cert, cplx(0.0, 0.0));
  CHECK(hit.inside);
  CHECK(hit.component == 0);
  CHECK_FALSE(region_contains(cert, cplx(cert.right_edge - 0.1, cert.h)).inside);
  CHECK(nearest_index(kHarmonic, 10.2) == 6);
  CHECK(nearest_index(kHarmonic, -3.0) == 1);

  SUBCASE("tampered certificates are rejected") {
    auto bad = cert;
    bad.N = 1;
    bad.right_edge = kHarmonic.mu(2) + 0.5;
    CHECK_FALSE(verify_certificate(bad).empty());
    bad = cert;
    bad.h = 1.2;
    CHECK_FALSE(verify_certificate(bad).empty());
    bad = cert;
    bad.boundary_audit[3].bound = 0.0;
    CHECK_FALSE(verify_certificate(bad).empty());
  }
  SUBCASE("zero perturbation") {
    const auto z = certify_enclosure(envelope(0.0, 0.25), kHarmonic);
    CHECK(z.N == 1);
    CHECK(z.h == doctest::Approx(1.001));
    CHECK(z.audit_passed());
  }
}

TEST_CASE("refined radii") {
  for (double alpha : {0.25, 1.0}) {
    const auto cert = certify_enclosure(envelope(0.3, alpha), kHarmonic);
    const auto law = fit_radius_law(cert, 400);
    REQUIRE(law.certified);
    const double g = 2.0 * alpha;
    for (std::size_t k = cert.N + 2; k <= 600; k += 7) {
      const double r = refined_radius(k, law);
      CHECK(r <= 0.5);
      CHECK(r > 0.0);
      // The shrunken circle still certifies ||B(z)|| <= 1/2.
      CHECK(0.3 * certified_sum_bound(g, k, kHarmonic, r).total <= 0.5 + 1e-12);
    }
    const double a = refined_radius(200, law), b = refined_radius(400, law);
    if (a < 0.5 && b < 0.5) {
      const double expect = g <= 1.0 ? std::pow(2.0, -g) * std::log(400.0) / std::log(200.0) : 0.5;
      CHECK(b / a == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("Schur test") {
  const std::vector<double> ones{1, 1, 1, 1};
  CHECK(schur_norm_bound(2, 2, ones) == doctest::Approx(2.0));
  const std::vector<double> d{1, 0, 0, 0, 2, 0, 0, 0, 3};
  CHECK(schur_norm_bound(3, 3, d) == doctest::Approx(3.0));
  const std::vector<double> neg{1, -1};
  CHECK_THROWS_AS(schur_norm_bound(1, 2, neg), Error);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> e(2500);
  for (auto& x : e) x = u(rng);
  // Power iteration on A^T A.
  std::vector<double> v(50, 1.0), w(50);
  double sv = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> t(50, 0.0);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) t[i] += e[i * 50 + j] * v[j];
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) w[j] += e[i * 50 + j] * t[i];
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    for (int j = 0; j < 50; ++j) v[j] = w[j] / nw;
    sv = std::sqrt(nw);
  }
  CHECK(schur_norm_bound(50, 50, e) >= sv);
  linalg::ComplexMatrix m(50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) m(i, j) = std::polar(e[i * 50 + j], 0.1 * i * j);
  CHECK(schur_norm_bound(m) >= linalg::operator_norm(m));
}
