// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "riesz_osc/forms.hpp"
#include "riesz_osc/hermite.hpp"

using namespace riesz_osc;
using namespace riesz_osc::forms;

namespace {

const OscillatorModel kHarmonic = OscillatorModel::harmonic();

// Composite Simpson on [a, b] with n (even) intervals; an oracle independent of
// the library's Gauss-Legendre panels.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("oscillator model") {
  CHECK(kHarmonic.mu(1) == 1.0);
  CHECK(kHarmonic.mu(5) == 9.0);
  CHECK(kHarmonic.normalized());
  for (std::size_t k = 1; k < 1000; ++k) CHECK(kHarmonic.mu(k) >= double(k));
  const auto t = OscillatorModel::table({1.0, 2.5, 4.0}, 1.0);
  CHECK(t.mu(5) == 6.0);
  CHECK(t.normalized());
  CHECK_FALSE(OscillatorModel::table({0.5, 1.0}, 1.0).normalized());
  CHECK_THROWS_AS(OscillatorModel::table({2.0, 1.0}, 1.0), Error);
  CHECK_THROWS_AS(kHarmonic.mu(0), Error);
}

TEST_CASE("delta matrix elements") {
  const PerturbationForm f{Delta{1.0, 0.0}};
  CHECK(std::abs(matrix_element(f, kHarmonic, 1, 1) - 1.0 / std::sqrt(kPi)) < 1e-15);
  CHECK(matrix_element(f, kHarmonic, 1, 2) == cplx(0.0));

  const auto b = matrix_block(f, kHarmonic, 40);
  for (std::size_t m = 1; m <= 40; ++m)
    for (std::size_t n = 1; n <= 40; ++n) {
      CHECK(b(m - 1, n - 1).imag() == 0.0);
      CHECK(b(m - 1, n - 1) == b(n - 1, m - 1));
      // psi_m = h_{m-1} is odd exactly when m is even.
      if (m % 2 == 0 || n % 2 == 0) CHECK(b(m - 1, n - 1) == cplx(0.0));
    }

  const PerturbationForm g{Delta{{0.5, 0.3}, 0.7}};
  const auto c = matrix_block(g, kHarmonic, 30);
  bool hermitian = true;
  for (std::size_t m = 0; m < 30; ++m)
    for (std::size_t n = 0; n < 30; ++n) {
      CHECK(c(m, n) == c(n, m));
      if (std::abs(c(m, n) - std::conj(c(n, m))) > 1e-12) hermitian = false;
      CHECK(std::abs(c(m, n) - matrix_element(g, kHarmonic, m + 1, n + 1)) < 1e-15);
    }
  CHECK_FALSE(hermitian);
}

TEST_CASE("linear perturbation matches quadrature of c x h_m h_n") {
  const PerturbationForm f{TridiagonalLinear{{0.0, 2.0}}};
  const cplx e12 = matrix_element(f, kHarmonic, 1, 2);
  CHECK(std::abs(e12 - cplx(0.0, std::sqrt(2.0))) < 1e-15);
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t n = 1; n <= 8; ++n) {
      const double q = simpson(
          [&](double x) { return x * hermite::eval(unsigned(m - 1), x) * hermite::eval(unsigned(n - 1), x); }, -14.0,
          14.0, 4000);
      CHECK(std::abs(matrix_element(f, kHarmonic, m, n) - cplx(0.0, 2.0) * q) < 1e-10);
    }
  const auto b = matrix_block(f, kHarmonic, 3);
  CHECK(std::abs(b(0, 1) - cplx(0.0, std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(b(1, 2) - cplx(0.0, 2.0)) < 1e-15);
}

TEST_CASE("multi-delta truncation tail bound") {
  MultiDelta md{1.0, 0.5, 1.0, {}};
  const PerturbationForm f{md};
  BlockInfo info;
  const auto b = matrix_block(f, kHarmonic, 48, &info);
  CHECK(info.tail_bound <= md.tail.tolerance);
  CHECK(info.lattice_radius >= std::sqrt(2.0 * 97.0));

  // Brute force with a 10x larger lattice radius.
  MultiDelta wide = md;
  wide.tail.radius = 10.0 * info.lattice_radius;
  const auto w = matrix_block(PerturbationForm{wide}, kHarmonic, 48);
  double omitted = 0.0;
  for (std::size_t i = 0; i < 48; ++i)
    for (std::size_t j = 0; j < 48; ++j) omitted = std::max(omitted, std::abs(w(i, j) - b(i, j)));
  CHECK(omitted <= info.tail_bound + 1e-15);

  SUBCASE("bound dominates a deliberately short truncation") {
    const std::size_t K = 24;
    const double r = std::sqrt(2.0 * (2.0 * K - 1.0)) + 0.5;
    MultiDelta shortf = md;
    shortf.tail = {r, 1.0};
    const double bound = multidelta_tail_bound(shortf, K, r);
    const auto s = matrix_block(PerturbationForm{shortf}, kHarmonic, K);
    const auto l = matrix_block(PerturbationForm{wide}, kHarmonic, K);
    double diff = 0.0;
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) diff = std::max(diff, std::abs(l(i, j) - s(i, j)));
    CHECK(diff <= bound);
    CHECK(diff > 0.0);
  }
  SUBCASE("fixed radius that is too small names the required radius") {
    MultiDelta tight = md;
    tight.tail.radius = 5.0;
    try {
      matrix_block(PerturbationForm{tight}, kHarmonic, 48);
      FAIL("expected TailBoundError");
    } catch (const TailBoundError& e) {
      CHECK(e.required_radius() >= std::sqrt(2.0 * 97.0));
    }
  }
  SUBCASE("single elements agree with the block") {
    for (std::size_t m : {1u, 7u, 30u})
      for (std::size_t n : {2u, 30u}) CHECK(std::abs(matrix_element(f, kHarmonic, m, n) - b(m - 1, n - 1)) < 1e-12);
  }
}

TEST_CASE("function potentials") {
  SUBCASE("V = c x reproduces the tridiagonal form") {
    FunctionPotential v{[](double x) { return cplx(0.0, 2.0) * x; }, 0, 0, {}, 1e-10, "2ix"};
    BlockInfo info;
    const auto b = matrix_block(PerturbationForm{v}, kHarmonic, 32, &info);
    const auto t = matrix_block(PerturbationForm{TridiagonalLinear{{0.0, 2.0}}}, kHarmonic, 32);
    double d = 0.0;
    for (std::size_t i = 0; i < 32; ++i)
      for (std::size_t j = 0; j < 32; ++j) d = std::max(d, std::abs(b(i, j) - t(i, j)));
    CHECK(d < 1e-10);
    CHECK(info.quadrature_error <= 1e-10);
    CHECK(info.quadrature_nodes > 0);
  }
  SUBCASE("kinked |x| with a declared singular point") {
    FunctionPotential v{[](double x) { return cplx(std::abs(x)); }, 0, 0, {0.0}, 1e-10, "|x|"};
    const auto b = matrix_block(PerturbationForm{v}, kHarmonic, 16);
    for (std::size_t m = 1; m <= 16; m += 3)
      for (std::size_t n = 1; n <= 16; n += 5) {
        auto g = [&](double x) { return std::abs(x) * hermite::eval(unsigned(m - 1), x) * hermite::eval(unsigned(n - 1), x); };
        const double q = simpson(g, -14.0, 0.0, 40000) + simpson(g, 0.0, 14.0, 40000);
        CHECK(std::abs(b(m - 1, n - 1) - q) < 1e-9);
        CHECK(std::abs(matrix_element(PerturbationForm{v}, kHarmonic, m, n) - q) < 1e-9);
      }
  }
  SUBCASE("integrable |x|^{-1/2} singularity converges") {
    FunctionPotential v{[](double x) { return cplx(1.0 / std::sqrt(std::abs(x))); }, 0, 0, {0.0}, 1e-9, "|x|^-1/2"};
    const auto b = matrix_block(PerturbationForm{v}, kHarmonic, 8);
    // integral of |x|^{-1/2} h_0^2 = pi^{-1/2} Gamma(1/4).
    CHECK(std::abs(b(0, 0) - std::tgamma(0.25) / std::sqrt(kPi)) < 1e-8);
  }
  SUBCASE("non-integrable singularity reports the residual") {
    FunctionPotential v{[](double x) { return cplx(1.0 / (x * x)); }, 0, 0, {0.0}, 1e-10, "x^-2"};
    CHECK_THROWS_AS(matrix_block(PerturbationForm{v}, kHarmonic, 8), QuadratureError);
  }
  SUBCASE("predicted exponent for L(p, tau)") {
    FunctionPotential v{[](double) { return cplx(1.0); }, 8.0, 0.0, {}, 1e-10, "c"};
    CHECK(predicted_alpha(v) == doctest::Approx(1.0 / 32.0));
    v.p = 4.0;
    CHECK(predicted_alpha(v) == doctest::Approx(1.0 / 16.0));
  }
}

TEST_CASE("hermite forms need a hermite basis") {
  const auto t = OscillatorModel::table({1.0, 2.0, 3.0}, 1.0);
  CHECK_THROWS_AS(matrix_block(PerturbationForm{Delta{1.0, 0.0}}, t, 4), Error);
  RawMatrix raw(linalg::ComplexMatrix::identity(3), 9.0, 1.0);
  CHECK(matrix_block(PerturbationForm{raw}, t, 4)(2, 2) == cplx(1.0));
}

TEST_CASE("envelope fits") {
  SUBCASE("delta: alpha = 1/4 with M_b = |nu| / sqrt(pi)") {
    const auto fit = fit_envelope(PerturbationForm{Delta{1.0, 0.0}}, kHarmonic, 256);
    CHECK(fit.alpha == doctest::Approx(0.25).epsilon(0.02));
    CHECK(fit.M_b == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-12));
    CHECK(fit.max_residual <= 0.0);
  }
  SUBCASE("multi-delta with beta + gamma > 1 stays bounded") {
    const PerturbationForm f{MultiDelta{1.0, 0.5, 1.0, {}}};
    const auto b = matrix_block(f, kHarmonic, 256);
    const auto big = fit_envelope(b);
    const std::vector<double> a{big.alpha};
    const std::vector<std::size_t> sizes{64, 256};
    const auto M = kernels::weighted_max(b, a, sizes, kernels::Backend::reference);
    CHECK(M[0][1] == big.M_b);
    CHECK(M[0][1] / M[0][0] < 1.05);
    CHECK(big.alpha >= 1.0 / 12);
    CHECK(big.max_residual <= 0.0);
  }
  SUBCASE("multi-delta with beta + gamma < 1 has no envelope") {
    const PerturbationForm f{MultiDelta{0.5, 0.3, 1.0, {}}};
    try {
      fit_envelope(f, kHarmonic, 256);
      FAIL("expected EnvelopeError");
    } catch (const EnvelopeError& e) {
      CHECK(e.growth() > 0.25);
      CHECK(std::string(e.what()).find("no local-subordination envelope") != std::string::npos);
    }
  }
  SUBCASE("linear perturbation has no envelope") {
    CHECK_THROWS_AS(fit_envelope(PerturbationForm{TridiagonalLinear{{0.0, 2.0}}}, kHarmonic, 128), EnvelopeError);
  }
  SUBCASE("zero form") {
    const auto fit = fit_envelope(PerturbationForm{Delta{0.0, 0.0}}, kHarmonic, 32);
    CHECK(fit.M_b == 0.0);
  }
  SUBCASE("M_b at fixed alpha never decreases as the grid grows") {
    const auto b = matrix_block(PerturbationForm{MultiDelta{1.0, 0.5, {0.3, 1.0}, {}}}, kHarmonic, 128);
    const std::vector<double> alphas{1.0 / 12, 1.0 / 8, 0.25, 0.5};
    const std::vector<std::size_t> sizes{16, 24, 32, 48, 64, 96, 128};
    const auto M = kernels::weighted_max(b, alphas, sizes, kernels::Backend::reference);
    for (const auto& row : M)
      for (std::size_t s = 1; s < sizes.size(); ++s) CHECK(row[s] >= row[s - 1]);
  }
}

TEST_CASE("raw matrices") {
  linalg::ComplexMatrix e(3);
  e(0, 0) = 1.0;
  e(2, 1) = cplx(0.0, 0.1);
  CHECK_NOTHROW(RawMatrix(e, 1.0, 0.5));
  CHECK_THROWS_AS(RawMatrix(e, 0.5, 0.5), EnvelopeError);
  RawMatrix r(e, 1.0, 0.5);
  CHECK(r.at(3, 2) == cplx(0.0, 0.1));
  CHECK(r.at(9, 9) == cplx(0.0));
  const auto fit = fit_envelope(PerturbationForm{r}, kHarmonic, 16);
  CHECK(fit.M_b == 1.0);
  CHECK(fit.alpha == 0.5);
  CHECK(fit.max_residual <= 0.0);

  std::istringstream csv("m,n,re,im\n1,1,0.5,0\n3,2,0,-1.5\n\n");
  const auto m = read_matrix_csv(csv);
  CHECK(m.rows() == 3);
  CHECK(m(2, 1) == cplx(0.0, -1.5));
  std::istringstream bad("m,n,re,im\n0,1,1,1\n");
  CHECK_THROWS_AS(read_matrix_csv(bad), Error);
  std::istringstream dup("m,n,re,im\n1,1,1,1\n1,1,2,2\n");
  CHECK_THROWS_AS(read_matrix_csv(dup), Error);
  std::istringstream hdr("a,b\n");
  CHECK_THROWS_AS(read_matrix_csv(hdr), Error);
}

TEST_CASE("zeta upper bound") {
  CHECK(zeta_upper(2.0) >= kPi * kPi / 6.0);
  CHECK(zeta_upper(2.0) - kPi * kPi / 6.0 < 1e-7);
  CHECK(zeta_upper(1.2) >= 5.5915);
  CHECK_THROWS_AS(zeta_upper(1.0), Error);
}

TEST_CASE("subordination") {
  const PerturbationForm f{Delta{1.0, 0.0}};
  const auto block = matrix_block(f, kHarmonic, 256);
  const auto fit = fit_envelope(block);
  SUBCASE("delta, p = 1 - 2 alpha + 0.1") {
    const auto rep = subordination_check(block, kHarmonic, fit, 1.0 - 2.0 * fit.alpha + 0.1, 1000);
    CHECK(rep.passed);
    CHECK(rep.beta == doctest::Approx(rep.p / 2));
    CHECK(rep.worst_ratio > 0.0);
  }
  SUBCASE("single index reduces to M_b j^{-2 alpha} / (mu_j^p C_p)") {
    const auto rep = subordination_check(block, kHarmonic, fit, 0.6, 0);
    const double first = std::abs(block(0, 0)) / (rep.C_p * std::pow(kHarmonic.mu(1), 0.6));
    CHECK(rep.worst_ratio >= first);
    CHECK(rep.worst_ratio <= 1.0);
  }
  SUBCASE("p below 1 - 2 alpha is rejected") {
    CHECK_THROWS_AS(subordination_check(block, kHarmonic, fit, 0.4, 10), Error);
  }
  SUBCASE("bounded case alpha = 0.6, p = 0") {
    linalg::ComplexMatrix e(200);
    for (std::size_t m = 1; m <= 200; ++m)
      for (std::size_t n = 1; n <= 200; ++n)
        e(m - 1, n - 1) = std::polar(0.8 * std::pow(double(m * n), -0.6), 0.37 * double(m + n));
    RawMatrix raw(e, 0.8, 0.6);
    const auto rfit = declared_envelope(raw);
    const auto rep = subordination_check(e, kHarmonic, rfit, 0.0, 1000);
    CHECK(rep.passed);
    CHECK(rep.C_p == doctest::Approx(0.8 * zeta_upper(1.2)));
  }
}
