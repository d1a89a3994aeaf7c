// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <sstream>

#include "internal.hpp"
#include "riesz_osc/hermite.hpp"

namespace riesz_osc::forms {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double lattice_point(const MultiDelta& f, long k) {
  const double ak = std::pow(static_cast<double>(std::labs(k)), f.gamma);
  return k < 0 ? -ak : ak;
}

cplx lattice_weight(const MultiDelta& f, long k) {
  if (k == 0) return f.nu0;
  return f.nu0 * std::pow(static_cast<double>(std::labs(k)), -f.beta);
}

void validate(const MultiDelta& f) {
  if (!(f.gamma > 0.0 && f.gamma <= 1.0)) throw Error("multi-delta lattice exponent gamma must lie in (0, 1]");
  if (!(f.beta >= 0.0)) throw Error("multi-delta weight exponent beta must be nonnegative");
}

// Lattice radius for a K x K block and the certified bound it leaves behind.
double lattice_radius(const MultiDelta& f, std::size_t K, double& tail) {
  const double tol = f.tail.tolerance;
  if (f.tail.radius > 0.0) {
    tail = multidelta_tail_bound(f, K, f.tail.radius);
    if (tail > tol) {
      const double need = multidelta_required_radius(f, K, tol);
      std::ostringstream os;
      os << "multi-delta truncation at radius " << f.tail.radius << " leaves a tail bound of " << tail
         << " > " << tol << "; required radius " << need;
      throw TailBoundError(os.str(), need);
    }
    return f.tail.radius;
  }
  const double r = multidelta_required_radius(f, K, tol);
  tail = multidelta_tail_bound(f, K, r);
  return r;
}

// Symmetric rank-one-per-node accumulation sum_q w_q v_q v_q^T.
linalg::ComplexMatrix node_sum(const std::vector<double>& x, const std::vector<cplx>& w, std::size_t K,
                               kernels::Backend backend) {
  std::vector<double> table(x.size() * K);
  kernels::for_each_index(
      x.size(),
      [&](std::size_t q) {
        const auto v = hermite::eval_all(static_cast<unsigned>(K - 1), x[q]);
        std::copy(v.begin(), v.end(), table.begin() + static_cast<std::ptrdiff_t>(q * K));
      },
      backend);
  linalg::ComplexMatrix out(K);
  kernels::accumulate_weighted_outer(w, table, K, out, backend);
  return out;
}

}  // namespace

RawMatrix::RawMatrix(linalg::ComplexMatrix entries, double declared_M_b, double declared_alpha)
    : entries_(std::move(entries)), M_b_(declared_M_b), alpha_(declared_alpha) {
  if (!entries_.square()) throw Error("raw matrix must be square");
  if (!entries_.all_finite()) throw Error("raw matrix has non-finite entries");
  if (!(M_b_ >= 0.0) || !(alpha_ > 0.0)) throw Error("raw matrix envelope needs M_b >= 0 and alpha > 0");
  for (std::size_t m = 1; m <= size(); ++m)
    for (std::size_t n = 1; n <= size(); ++n) {
      const double bound = M_b_ * std::pow(double(m) * double(n), -alpha_);
      const double v = std::abs(entries_(m - 1, n - 1));
      if (v > bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "declared envelope violated at (" << m << ", " << n << "): |b| = " << v << " > " << bound;
        throw EnvelopeError(os.str(), v / bound - 1.0);
      }
    }
}

cplx RawMatrix::at(std::size_t m, std::size_t n) const {
  if (m == 0 || n == 0) throw Error("matrix indices start at 1");
  if (m > size() || n > size()) return 0.0;
  return entries_(m - 1, n - 1);
}

std::string PerturbationForm::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Delta& f) { os << "delta(nu=" << f.nu << ", x0=" << f.x0 << ")"; },
                 [&](const MultiDelta& f) {
                   os << "multi-delta(gamma=" << f.gamma << ", beta=" << f.beta << ", nu0=" << f.nu0 << ")";
                 },
                 [&](const FunctionPotential& f) { os << "potential(" << f.label << ")"; },
                 [&](const TridiagonalLinear& f) { os << "linear(c=" << f.c << ")"; },
                 [&](const RawMatrix& f) { os << "raw(" << f.size() << "x" << f.size() << ")"; },
             },
             kind);
  return os.str();
}

bool PerturbationForm::is_zero() const {
  return std::visit(overloaded{
                        [](const Delta& f) { return f.nu == cplx{}; },
                        [](const MultiDelta& f) { return f.nu0 == cplx{}; },
                        [](const FunctionPotential&) { return false; },
                        [](const TridiagonalLinear& f) { return f.c == cplx{}; },
                        [](const RawMatrix& f) { return f.declared_M_b() == 0.0; },
                    },
                    kind);
}

double multidelta_tail_bound(const MultiDelta& f, std::size_t K, double radius) {
  validate(f);
  const auto env = hermite::kCalibratedEnvelope;
  // Omitted points must sit in the Gaussian regime of every h_n with n < K.
  const double gaussian_start = std::sqrt(2.0 * (2.0 * static_cast<double>(K) - 1.0));
  if (radius < gaussian_start) return std::numeric_limits<double>::infinity();
  // First omitted |k|; then |nu_k h_m(p_k) h_n(p_k)| <= |nu0| c^2 e^{-2 xi k^{2 gamma}} and
  // sum_{k >= k0} e^{-xi k^{2gamma}} <= Gamma(1 + 1/(2gamma)) xi^{-1/(2gamma)}.
  const double k0 = std::floor(std::pow(radius, 1.0 / f.gamma)) + 1.0;
  const double g = 2.0 * f.gamma;
  const double integral = std::tgamma(1.0 + 1.0 / g) * std::pow(env.xi, -1.0 / g);
  return 2.0 * std::abs(f.nu0) * env.c_env * env.c_env * std::exp(-env.xi * std::pow(k0, g)) * integral;
}

double multidelta_required_radius(const MultiDelta& f, std::size_t K, double tolerance) {
  validate(f);
  const auto env = hermite::kCalibratedEnvelope;
  const double g = 2.0 * f.gamma;
  const double base = std::sqrt(2.0 * (2.0 * static_cast<double>(K) + 1.0)) + 2.0;
  const double integral = std::tgamma(1.0 + 1.0 / g) * std::pow(env.xi, -1.0 / g);
  const double scale = 2.0 * std::abs(f.nu0) * env.c_env * env.c_env * integral;
  if (scale <= tolerance) return base;
  // k0^{2 gamma} > radius^2 >= log(scale / tol) / xi.
  const double need = std::sqrt(std::log(scale / tolerance) / env.xi);
  return std::max(base, need);
}

double predicted_alpha(const FunctionPotential& f) {
  double t = 0.0;
  if (f.p >= 2.0 && f.p < 4.0)
    t = -(2.0 - 2.0 / f.p) / 12.0;
  else if (f.p > 4.0)
    t = -1.0 / (2.0 * f.p);
  else if (f.p == 4.0)
    t = -1.0 / 8.0;  // up to the log factor
  else
    throw Error("predicted exponent needs p >= 2");
  return -(f.tau / 2.0 + t) / 2.0;
}

cplx matrix_element(const PerturbationForm& form, const OscillatorModel& model, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw Error("matrix indices start at 1");
  if (!std::holds_alternative<RawMatrix>(form.kind)) detail::require_hermite(model);
  return std::visit(
      overloaded{
          [&](const Delta& f) -> cplx {
            return f.nu * hermite::eval(static_cast<unsigned>(m - 1), f.x0) *
                   hermite::eval(static_cast<unsigned>(n - 1), f.x0);
          },
          [&](const MultiDelta& f) -> cplx {
            const std::size_t K = std::max(m, n);
            double tail = 0.0;
            const double r = lattice_radius(f, K, tail);
            const long kmax = static_cast<long>(std::floor(std::pow(r, 1.0 / f.gamma)));
            cplx s = 0.0;
            for (long k = -kmax; k <= kmax; ++k) {
              const double x = lattice_point(f, k);
              s += lattice_weight(f, k) * hermite::eval(static_cast<unsigned>(m - 1), x) *
                   hermite::eval(static_cast<unsigned>(n - 1), x);
            }
            return s;
          },
          [&](const FunctionPotential& f) -> cplx {
            const auto rule = detail::potential_rule(f, std::max(m, n));
            cplx s = 0.0;
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
              if (rule.fine[q] == 0.0) continue;
              s += rule.fine[q] * f.V(rule.x[q]) * hermite::eval(static_cast<unsigned>(m - 1), rule.x[q]) *
                   hermite::eval(static_cast<unsigned>(n - 1), rule.x[q]);
            }
            return s;
          },
          [&](const TridiagonalLinear& f) -> cplx {
            if (n == m + 1) return f.c * std::sqrt(static_cast<double>(m) / 2.0);
            if (m == n + 1) return f.c * std::sqrt(static_cast<double>(m - 1) / 2.0);
            return 0.0;
          },
          [&](const RawMatrix& f) -> cplx { return f.at(m, n); },
      },
      form.kind);
}

linalg::ComplexMatrix matrix_block(const PerturbationForm& form, const OscillatorModel& model, std::size_t K,
                                   BlockInfo* info, kernels::Backend backend) {
  if (K == 0) throw Error("block size must be positive");
  if (!std::holds_alternative<RawMatrix>(form.kind)) detail::require_hermite(model);
  BlockInfo local;
  linalg::ComplexMatrix b = std::visit(
      overloaded{
          [&](const Delta& f) {
            const auto v = hermite::eval_all(static_cast<unsigned>(K - 1), f.x0);
            linalg::ComplexMatrix out(K);
            for (std::size_t i = 0; i < K; ++i)
              for (std::size_t j = 0; j < K; ++j) out(i, j) = f.nu * (v[i] * v[j]);
            return out;
          },
          [&](const MultiDelta& f) {
            const double r = lattice_radius(f, K, local.tail_bound);
            local.lattice_radius = r;
            const long kmax = static_cast<long>(std::floor(std::pow(r, 1.0 / f.gamma)));
            std::vector<double> x;
            std::vector<cplx> w;
            for (long k = -kmax; k <= kmax; ++k) {
              x.push_back(lattice_point(f, k));
              w.push_back(lattice_weight(f, k));
            }
            return node_sum(x, w, K, backend);
          },
          [&](const FunctionPotential& f) {
            const auto rule = detail::potential_rule(f, K);
            std::vector<cplx> wf(rule.x.size()), wd(rule.x.size());
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
              const cplx v = f.V(rule.x[q]);
              wf[q] = rule.fine[q] * v;
              wd[q] = (rule.fine[q] - rule.coarse[q]) * v;
            }
            local.quadrature_nodes = rule.x.size();
            auto out = node_sum(rule.x, wf, K, backend);
            const auto diff = node_sum(rule.x, wd, K, backend);
            double err = 0.0;
            for (std::size_t i = 0; i < K; ++i)
              for (std::size_t j = 0; j < K; ++j) err = std::max(err, std::abs(diff(i, j)));
            local.quadrature_error = err;
            if (err > f.tolerance) {
              std::ostringstream os;
              os << "quadrature for " << f.label << " did not reach tolerance " << f.tolerance
                 << " (estimated error " << err << ")";
              throw QuadratureError(os.str(), err);
            }
            return out;
          },
          [&](const TridiagonalLinear& f) {
            linalg::ComplexMatrix out(K);
            for (std::size_t m = 1; m < K; ++m) {
              out(m - 1, m) = f.c * std::sqrt(static_cast<double>(m) / 2.0);
              out(m, m - 1) = f.c * std::sqrt(static_cast<double>(m) / 2.0);
            }
            return out;
          },
          [&](const RawMatrix& f) {
            linalg::ComplexMatrix out(K);
            const std::size_t L = std::min(K, f.size());
            for (std::size_t i = 0; i < L; ++i)
              for (std::size_t j = 0; j < L; ++j) out(i, j) = f.entries()(i, j);
            return out;
          },
      },
      form.kind);
  if (info) *info = local;
  return b;
}

}  // namespace riesz_osc::forms
