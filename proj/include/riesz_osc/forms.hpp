// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "riesz_osc/common.hpp"
#include "riesz_osc/kernels.hpp"
#include "riesz_osc/linalg.hpp"
#include "riesz_osc/oscillator.hpp"

namespace riesz_osc::forms {

/// nu * delta(x - x0).
struct Delta {
  cplx nu;
  double x0 = 0.0;
};

/// Lattice truncation of a multi-delta form.
struct TailPolicy {
  /// Largest |p_k| kept; 0 selects it automatically from the block size and tolerance.
  double radius = 0.0;
  /// Bound on the omitted lattice contribution to any single matrix element.
  double tolerance = 1e-13;
};

/// sum_k nu_k delta(x - p_k) with p_k = sgn(k)|k|^gamma, nu_k = nu0 |k|^{-beta}, nu_0 = nu0.
struct MultiDelta {
  double gamma;
  double beta;
  cplx nu0;
  TailPolicy tail;
};

/// Multiplication by V(x), with V in the weighted class L(p, tau).
struct FunctionPotential {
  std::function<cplx(double)> V;
  double p = 0.0;
  double tau = 0.0;
  /// Points where V is not smooth or not finite; the quadrature mesh is graded toward them.
  std::vector<double> singular_points;
  /// Absolute quadrature tolerance per matrix element.
  double tolerance = 1e-10;
  std::string label = "V";
};

/// c * x, i.e. c <x psi_m, psi_n>.
struct TridiagonalLinear {
  cplx c;
};

/// Explicit matrix elements b(psi_m, psi_n) for m, n <= size(); zero beyond.
/// The caller declares an envelope M_b (mn)^{-alpha}, which is verified on construction.
class RawMatrix {
 public:
  RawMatrix(linalg::ComplexMatrix entries, double declared_M_b, double declared_alpha);
  std::size_t size() const { return entries_.rows(); }
  cplx at(std::size_t m, std::size_t n) const;
  const linalg::ComplexMatrix& entries() const { return entries_; }
  double declared_M_b() const { return M_b_; }
  double declared_alpha() const { return alpha_; }

 private:
  linalg::ComplexMatrix entries_;
  double M_b_;
  double alpha_;
};

/// Reads `m,n,re,im` rows (1-based, header required); unspecified entries are zero.
linalg::ComplexMatrix read_matrix_csv(std::istream& in);
linalg::ComplexMatrix read_matrix_csv_file(const std::string& path);

using FormKind = std::variant<Delta, MultiDelta, FunctionPotential, TridiagonalLinear, RawMatrix>;

struct PerturbationForm {
  FormKind kind;
  std::string describe() const;
  bool is_zero() const;
};

/// Side information from assembling a block of matrix elements.
struct BlockInfo {
  /// Certified bound on the omitted multi-delta lattice terms, per element.
  double tail_bound = 0.0;
  /// Lattice radius actually used.
  double lattice_radius = 0.0;
  /// Estimated absolute quadrature error, per element.
  double quadrature_error = 0.0;
  std::size_t quadrature_nodes = 0;
};

/// b(psi_m, psi_n) for 1-based m, n.
cplx matrix_element(const PerturbationForm& form, const OscillatorModel& model, std::size_t m, std::size_t n);

/// Matrix B with B(m-1, n-1) = b(psi_m, psi_n) for m, n <= K.
linalg::ComplexMatrix matrix_block(const PerturbationForm& form, const OscillatorModel& model, std::size_t K,
                                   BlockInfo* info = nullptr,
                                   kernels::Backend backend = kernels::default_backend());

/// Radius |p| beyond which omitted lattice points contribute at most `tolerance`
/// to any element of the K x K block.
double multidelta_required_radius(const MultiDelta& f, std::size_t K, double tolerance);
/// Certified per-element bound on lattice points with |p_k| > radius, for a K x K block.
double multidelta_tail_bound(const MultiDelta& f, std::size_t K, double radius);

/// Exponent predicted for a potential in L(p, tau) from ||V h_n|| ~ n^{tau/2 + t(p)}.
double predicted_alpha(const FunctionPotential& f);

struct AlphaCandidate {
  double alpha;
  double M_full;  ///< max |b_mn| (mn)^alpha on [1, G]^2
  double M_half;  ///< same on [1, G/2]^2
  double M_quarter;
  bool admissible;
  bool from_regression;
};

struct EnvelopeFit {
  double M_b = 0.0;
  double alpha = 0.0;
  /// max over the grid of |b_mn| - M_b (mn)^{-alpha}; <= 0 when the envelope holds.
  double max_residual = 0.0;
  std::size_t grid_size = 0;
  /// M_full / M_half - 1 at the chosen alpha.
  double growth = 0.0;
  std::vector<AlphaCandidate> candidates;
};

struct FitOptions {
  /// M_b may grow by at most this factor per grid doubling.
  double max_growth = 1.05;
  kernels::Backend backend = kernels::default_backend();
};

/// Fits |b(psi_m, psi_n)| <= M_b (mn)^{-alpha} on [1, grid_max]^2. Candidate
/// exponents are 1/12, 1/8, 1/4, 1/2 and a log-log regression value; the largest
/// one whose M_b stays flat across the last two grid doublings wins.
/// Throws EnvelopeError ("no local-subordination envelope") when none does.
EnvelopeFit fit_envelope(const PerturbationForm& form, const OscillatorModel& model, std::size_t grid_max,
                         const FitOptions& opts = {});
/// Same, from an already assembled block.
EnvelopeFit fit_envelope(const linalg::ComplexMatrix& block, const FitOptions& opts = {});

/// Envelope of a raw matrix: its declared (M_b, alpha), verified against all entries.
EnvelopeFit declared_envelope(const RawMatrix& raw);

/// Upper bound on sum_{j>=1} j^{-s} (s > 1): exact partial sum plus integral tail.
double zeta_upper(double s);

struct SubordinationReport {
  double p = 0.0;
  double beta = 0.0;  ///< Hoelder exponent, beta = p / 2
  double C_p = 0.0;
  double worst_ratio = 0.0;  ///< max |b(f,f)| / (C_p a(f,f)^p ||f||^{2(1-p)})
  std::size_t trials = 0;
  bool passed = false;
};

/// Checks |b(f,f)| <= C_p a(f,f)^p ||f||^{2(1-p)} with C_p = M_b sum_j j^{-2(alpha+beta)}
/// on random finitely supported f (indices <= block size) plus every single-index f.
SubordinationReport subordination_check(const linalg::ComplexMatrix& block, const OscillatorModel& model,
                                        const EnvelopeFit& fit, double p, std::size_t trials,
                                        std::uint64_t seed = 1);

}  // namespace riesz_osc::forms
