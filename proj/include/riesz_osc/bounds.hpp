// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riesz_osc/common.hpp"
#include "riesz_osc/forms.hpp"
#include "riesz_osc/linalg.hpp"
#include "riesz_osc/oscillator.hpp"

namespace riesz_osc::bounds {

/// Floating-point slack allowed when a computed bound is compared against 1/2.
inline constexpr double kSlack = 1e-12;

/// n^{-g} log n for g <= 1, 1/n for g > 1. Requires n > 1.
double sigma(double gamma, double n);
/// h^{-g} (g < 1), log(h)/h (g = 1), 1/h (g > 1). Requires h > 1.
double tau(double gamma, double h);

/// C(g) with sum_k 1/(k^g |mu_k - z|) <= C(g) sigma_g(n) for every n >= 2 and
/// every z outside the open disk |z - mu_n| < 1/2 whose real part is in the
/// cell of mu_n. Assembled term by term from the unit-gap estimates.
double explicit_C(double gamma);
/// Smallest h for which explicit_D(gamma) is valid: 1 except at gamma = 1, where
/// tau_1(h) -> 0 as h -> 1 while the sum does not.
double explicit_D_min_h(double gamma);
/// D(g) with sum_k 1/(k^g (k + h)) <= D(g) tau_g(h) for h >= explicit_D_min_h(g).
double explicit_D(double gamma);

/// The single-n majorant 2 * (each estimate in the C(g) derivation) before the
/// n-dependence is folded into C(g) sigma_g(n). O(1) to evaluate.
double generic_sum_bound(double gamma, std::size_t n);

struct SumBoundCertificate {
  double gamma = 0.0;
  std::size_t n = 0;
  std::size_t k_cut = 0;
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  double total = 0.0;
};

/// Certified sup over z with Re z in the cell of mu_n and |z - mu_n| >= radius of
/// sum_k 1/(k^g |mu_k - z|). Uses the larger of |k - n|/2 and the distance from
/// mu_k to the cell as minorant; exact for k <= 8n, integral tail beyond.
SumBoundCertificate certified_sum_bound(double gamma, std::size_t n, const OscillatorModel& model,
                                        double radius = 0.5);

/// Same supremum bounded in O(log n): exact within |k - n| <= 32, blocks of
/// relative width 2% with worst-case terms beyond. Slightly above the exact
/// certificate; select_N tries it first.
double blocked_sum_bound(double gamma, std::size_t n, const OscillatorModel& model, double radius = 0.5);

/// Certified upper bound on sum_k 1/(k^g |mu_k - z|) at a single point z that is
/// not an eigenvalue mu_k.
double pointwise_sum_bound(double gamma, cplx z, const OscillatorModel& model);

/// Upper bound on sum_{k > K} k^{-g} / |mu_k - z|. Requires Re z < mu_{K+1}.
double tail_sum_bound(double gamma, cplx z, const OscillatorModel& model, std::size_t K);

/// Least N with M_b * certified_sum_bound(2 alpha, n).total <= 1/2 for all n > N.
/// Throws SearchLimitError ("envelope too weak") past n = 1e8.
std::size_t select_N(const forms::EnvelopeFit& fit, const OscillatorModel& model);

/// Left side of the condition that fixes h.
double h_condition(const forms::EnvelopeFit& fit, std::size_t N, double h);
/// Least h on the grid 1 + j/1000 with h_condition(fit, N, h) <= 1/2.
/// Throws SearchLimitError past h = 1e6.
double select_h(const forms::EnvelopeFit& fit, std::size_t N);

struct AuditPoint {
  cplx z;
  double bound;  ///< certified upper bound on ||B(z)||
};

/// Spectral enclosure: rectangle (-h, right_edge) x (-h, h) plus open disks of
/// radius 1/2 around mu_k for k > N + 1. Outside, ||B(z)|| <= 1/2.
struct EnclosureCertificate {
  double M_b = 0.0;
  double alpha = 0.0;
  std::size_t N = 1;
  double h = 1.0;
  /// mu_{N+1} + 1/2; equals N + 3/2 in the unit-gap case mu_k = k.
  double right_edge = 0.0;
  OscillatorModel model = OscillatorModel::harmonic();
  std::vector<AuditPoint> boundary_audit;
  double audit_max = 0.0;

  bool audit_passed() const { return audit_max <= 0.5 + kSlack; }
};

struct AuditOptions {
  std::size_t points_per_edge = 64;
  std::size_t points_per_circle = 16;
  /// Circles Gamma_k audited for N + 1 < k <= N + 1 + circles.
  std::size_t circles = 32;
};

/// Runs select_N and select_h and audits sampled boundary points of the region.
EnclosureCertificate certify_enclosure(const forms::EnvelopeFit& fit, const OscillatorModel& model,
                                       const AuditOptions& opts = {});

/// Recomputes N, h and the audit from (M_b, alpha) and checks the stored values
/// satisfy their defining inequalities. Returns the list of failures (empty when valid).
std::vector<std::string> verify_certificate(const EnclosureCertificate& cert);

struct RegionHit {
  bool inside = false;
  /// 0 for the rectangle, k for the disk around mu_k; meaningful only if inside.
  std::size_t component = 0;
};

RegionHit region_contains(const EnclosureCertificate& cert, cplx z);

/// Index k minimizing |mu_k - s|.
std::size_t nearest_index(const OscillatorModel& model, double s);

/// Shrinking radii r_k = min(1/2, c_r * shape(k)) with shape k^{-2a} log k
/// (2a <= 1) or 1/k (2a > 1).
struct RadiusLaw {
  double c_r = 0.0;
  double two_alpha = 0.0;
  /// false when some audited circle could not be certified; radii fall back to 1/2.
  bool certified = false;
  std::size_t k_min = 0;
  std::size_t k_max = 0;
};

/// r_k needed for ||B(z)|| <= 1/2 on |z - mu_k| = r_k: the k = n term of the sum
/// uses r_k instead of 1/2. Infinity when no radius suffices.
double required_radius(std::size_t k, const EnclosureCertificate& cert);

/// Least c_r covering required_radius over N + 1 < k <= k_max. The ratio
/// required/shape decreases in k, so the law extends past k_max.
RadiusLaw fit_radius_law(const EnclosureCertificate& cert, std::size_t k_max);
double refined_radius(std::size_t k, const RadiusLaw& law);

/// sqrt(max row sum * max column sum) of a nonnegative matrix (row-major).
double schur_norm_bound(std::size_t rows, std::size_t cols, std::span<const double> entries);
/// Same with entries |a(i, j)|.
double schur_norm_bound(const linalg::ComplexMatrix& a);

}  // namespace riesz_osc::bounds
