// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riesz_osc/bounds.hpp"
#include "riesz_osc/common.hpp"
#include "riesz_osc/forms.hpp"
#include "riesz_osc/kernels.hpp"
#include "riesz_osc/linalg.hpp"
#include "riesz_osc/oscillator.hpp"

namespace riesz_osc::spectral {

/// Galerkin truncation of T = A + b to span{psi_1, ..., psi_K}.
struct GalerkinOperator {
  OscillatorModel model = OscillatorModel::harmonic();
  forms::PerturbationForm form;
  std::size_t K = 0;
  /// b(psi_m, psi_n) at (m-1, n-1).
  linalg::ComplexMatrix b;
  /// T(n-1, m-1) = mu_n delta_nm + b(psi_m, psi_n).
  linalg::ComplexMatrix T;
  forms::BlockInfo info;
};

GalerkinOperator assemble(const OscillatorModel& model, const forms::PerturbationForm& form, std::size_t K,
                          kernels::Backend backend = kernels::default_backend());

/// Default K for a certificate: max(256, 8 (N + 2)).
std::size_t default_K(std::size_t N);

struct SpectrumOptions {
  /// |lambda_n(K) - lambda_n(K/2)| allowed for a trusted eigenvalue.
  double trust_tol = 1e-8;
  /// Raise the per-eigenvalue tolerance to the rounding level eps ||T||_F cond_n.
  bool roundoff_floor = true;
  /// Eigenvalues whose rounding level exceeds this are never trusted.
  double max_roundoff = 1e-6;
  linalg::EigenOptions eigen;
};

/// 1e-3 for point interactions, whose truncated eigenvalues converge like
/// K^{-1/2}; 1e-8 otherwise.
double default_trust_tol(const forms::PerturbationForm& form);

struct SpectralResult {
  std::size_t K = 0;
  /// Sorted by real part, then imaginary part; lambda_n is eigenvalues[n-1].
  std::vector<cplx> eigenvalues;
  /// Columns are right eigenvectors (unit norm) and left eigenvectors with l_n^* r_n = 1.
  linalg::ComplexMatrix right;
  linalg::ComplexMatrix left;
  std::vector<double> condition;
  std::vector<bool> biorthogonal;
  std::vector<double> mu;
  /// |lambda_n(K) - lambda_n(K/2)|; infinity for n > K/2 or an ambiguous match.
  std::vector<double> convergence;
  std::vector<double> tolerance;
  std::vector<bool> trusted;

  /// Set when a certificate was supplied.
  std::optional<bounds::EnclosureCertificate> certificate;
  /// Region of each tested eigenvalue (trusted, Re lambda <= mu_{K/2}).
  std::vector<std::optional<bounds::RegionHit>> membership;
  std::size_t rectangle_count = 0;
  /// disk_count[k] for 0 <= k <= K/2; entries k <= N + 1 stay zero.
  std::vector<std::size_t> disk_count;
  /// Trusted, tested eigenvalue indices that fall outside the region.
  std::vector<std::size_t> outside;

  std::size_t trusted_count() const;
  /// Indices k in (N + 1, K/2] whose disk holds other than one trusted eigenvalue.
  std::vector<std::size_t> disk_occupancy_failures() const;
};

/// Eigendecomposition of T_K and of its leading K/2 block; eigenvalues are
/// matched by nearest neighbour and a match claimed twice is left untrusted.
SpectralResult compute_spectrum(const GalerkinOperator& op,
                                const std::optional<bounds::EnclosureCertificate>& cert = std::nullopt,
                                const SpectrumOptions& opts = {});

/// B(z)_{kj} = -b(psi_j, psi_k) (z - mu_j)^{-1/2} (z - mu_k)^{-1/2} with the
/// principal branch, so that z - T_K = (z - A)^{1/2} (I + B(z)) (z - A)^{1/2}.
linalg::ComplexMatrix b_of_z(const GalerkinOperator& op, cplx z);

/// max |(z - mu_k)^{1/2} (delta_kj + B_kj) (z - mu_j)^{1/2} - (z - T_K)_{kj}|.
double factorization_defect(const GalerkinOperator& op, cplx z);

struct BAuditPoint {
  cplx z;
  /// Gamma_n index, or 0 for the rectangle boundary.
  std::size_t circle = 0;
  /// min(Frobenius, Schur) bound on the K x K block.
  double block_bound = 0.0;
  /// Envelope bound on the part of B(z) outside the K x K block.
  double tail_bound = 0.0;
  double total = 0.0;
  /// Constrained points (outside Pi) must satisfy total <= 1/2.
  bool constrained = true;
};

struct BAudit {
  std::vector<BAuditPoint> points;
  /// Worst constrained point.
  double max_bound = 0.0;
  cplx worst_point;
  /// Power-iteration operator norm of the block at the worst point.
  double worst_block_estimate = 0.0;
  /// Largest value at unconstrained points (circles inside the rectangle).
  double interior_max = 0.0;
  bool passed = false;
};

struct BAuditOptions {
  std::size_t samples_per_arc = 16;
  /// Also evaluate Gamma_n for n <= N + 1; recorded, never failed.
  bool include_interior = true;
  kernels::Backend backend = kernels::default_backend();
};

/// ||B(z)|| <= 1/2 + 1e-9 on sampled points of the rectangle boundary and of
/// Gamma_n, N + 1 < n <= K/2.
BAudit certify_B_bound(const GalerkinOperator& op, const bounds::EnclosureCertificate& cert,
                       const BAuditOptions& opts = {});

enum class ProjectionRoute { eigenvector, contour };

struct Projection {
  std::size_t n = 0;
  cplx lambda;
  /// P = u v^* for the eigenvector route.
  std::vector<cplx> u;
  std::vector<cplx> v;
  /// Dense P for the contour route; empty otherwise.
  linalg::ComplexMatrix matrix;
  double norm = 0.0;
  /// Contour route: ||P_q - P_{q/2}|| between the full and half node sets.
  double quadrature_error = 0.0;

  cplx entry(std::size_t i, std::size_t j) const;
  linalg::ComplexMatrix dense(std::size_t K) const;
};

struct ProjectionSet {
  ProjectionRoute route = ProjectionRoute::eigenvector;
  std::size_t K = 0;
  std::size_t N = 0;
  std::vector<Projection> projections;
  /// Sum of the projections for eigenvalues in the rectangle.
  linalg::ComplexMatrix S;
  std::vector<std::size_t> S_members;
  std::size_t S_rank = 0;
  bool S_from_contour = false;

  const Projection* find(std::size_t n) const;
};

/// P_n = r_n l_n^* for trusted n > N + 1 and S_{N+1}. Throws ClusterError when
/// two trusted eigenvalues above N + 1 are closer than 1e-8. S_{N+1} falls back
/// to the rectangle contour when an eigenpair inside it is not biorthogonal.
ProjectionSet projections_eigvec(const SpectralResult& result, std::size_t N,
                                 const GalerkinOperator* op = nullptr);

struct Circle {
  std::size_t n = 0;
  cplx center;
  double radius = 0.5;
};

/// Trapezoid rule on each circle; the resolvent comes from an LU solve per node.
/// Throws PoleError when an eigenvalue of T_K lies within 1e-6 of a contour.
ProjectionSet projections_contour(const GalerkinOperator& op, const std::vector<Circle>& circles,
                                  std::size_t quadrature_points = 64,
                                  kernels::Backend backend = kernels::default_backend());

struct RectangleContourOptions {
  /// Gauss-Legendre nodes per panel.
  std::size_t order = 16;
  /// Panels are at most max(min_panel, grading * distance to the nearest mu_k) long.
  double min_panel = 0.5;
  double grading = 0.5;
  kernels::Backend backend = kernels::default_backend();
};

struct RectangleProjection {
  linalg::ComplexMatrix S;
  std::size_t nodes = 0;
  /// ||S_16 - S_8|| from the embedded lower-order rule on the same panels.
  double quadrature_error = 0.0;
};

/// (1/2 pi i) of the resolvent integrated over the boundary of the rectangle.
RectangleProjection rectangle_projection(const GalerkinOperator& op, const bounds::EnclosureCertificate& cert,
                                         const RectangleContourOptions& opts = {});

struct KatoTerm {
  std::size_t n = 0;
  /// ||e_n^* (P_n - P_n^0)||^2, the largest possible contribution of index n.
  double row_norm_sq = 0.0;
  /// Mean of |e_n^* (P_n - P_n^0) u|^2 over the sampled unit vectors.
  double sampled_mean = 0.0;
};

struct KatoReport {
  std::size_t N_star = 0;
  std::size_t n_max = 0;
  /// max(c0_operator, c0_sampled).
  double c0_estimate = 0.0;
  /// Squared norm of the stacked rows.
  double c0_operator = 0.0;
  /// Largest sampled sum over n >= N_star.
  double c0_sampled = 0.0;
  std::vector<KatoTerm> per_n;
  std::size_t sample_count = 0;
};

/// Stacks e_n^* (P_n - P_n^0) for N_star <= n <= the largest contiguous index
/// in `proj`, and bounds sum_n ||P_n^0 (P_n - P_n^0) u||^2 / ||u||^2 by the
/// stacked operator norm and by random unit vectors.
KatoReport kato_check(const ProjectionSet& proj, std::size_t N_star, std::size_t samples,
                      std::uint64_t seed = 1);

/// Least N_star in [N + 3, max_N_star] with c0_estimate <= target; the last
/// report computed when none qualifies.
KatoReport find_kato_N_star(const ProjectionSet& proj, std::size_t max_N_star, std::size_t samples,
                            double target = 0.5, std::uint64_t seed = 1);

struct GrowthRow {
  std::size_t n = 0;
  double norm = 0.0;
  double sqrt_n = 0.0;
  double log_norm = 0.0;
  cplx lambda;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  /// Least-squares slope and intercept of log ||P_n|| against sqrt(n).
  double slope = 0.0;
  double intercept = 0.0;
};

/// ||P_n|| = ||r_n|| ||l_n|| for n_lo <= n <= n_hi. Throws UntrustedIndexError
/// listing indices in the range that are not trusted.
GrowthReport projection_growth(const SpectralResult& result, std::size_t n_lo, std::size_t n_hi);
GrowthReport projection_growth(const GalerkinOperator& op, std::size_t n_lo, std::size_t n_hi,
                               const SpectrumOptions& opts = {});

struct DecayFit {
  /// Exponent e in |lambda_n - mu_n| ~ n^e (times log n when 2 alpha <= 1).
  double exponent = 0.0;
  double intercept = 0.0;
  /// Root mean square residual of the regression.
  double residual = 0.0;
  bool log_corrected = false;
  /// Every distance in the window is zero to rounding.
  bool degenerate_zero = false;
  std::size_t n_lo = 0;
  std::size_t n_hi = 0;
  std::size_t points = 0;
};

/// Regresses log |lambda_n - mu_n| (minus log log n when 2 alpha <= 1) on log n
/// over trusted n > n_min with a nonzero distance. Needs 8 points.
DecayFit radius_decay_fit(const SpectralResult& result, const forms::EnvelopeFit& fit, std::size_t n_min = 2);

}  // namespace riesz_osc::spectral
