// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "../gauss.hpp"
#include "internal.hpp"
#include "riesz_osc/hermite.hpp"

namespace riesz_osc::forms::detail {

namespace {

constexpr int kPoints = 16;
constexpr int kMaxDepth = 90;

struct GaussLegendre {
  const std::vector<double>& x;
  const std::vector<double>& w;
};

GaussLegendre gl() {
  const auto& r = riesz_osc::detail::gauss_legendre(kPoints);
  return {r.x, r.w};
}

struct Panel {
  double a, b;
  int depth;
};

class ProxyIntegrator {
 public:
  ProxyIntegrator(const FunctionPotential& f, std::size_t K) : f_(f), K_(K) {}

  // |V| * sum_{k<K} h_k^2: smooth except where V is not, so it locates the panels
  // that need grading.
  double proxy(double x) const {
    const cplx v = f_.V(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "potential " << f_.label << " is not finite at x = " << x << "; declare it as a singular point";
      throw QuadratureError(os.str(), std::numeric_limits<double>::infinity());
    }
    const auto h = hermite::eval_all(static_cast<unsigned>(K_ - 1), x);
    double s = 0.0;
    for (double hk : h) s += hk * hk;
    return std::abs(v) * s;
  }

  double panel(double a, double b) const {
    const auto& r = gl();
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < kPoints; ++i) s += r.w[i] * proxy(c + hw * r.x[i]);
    return s * hw;
  }

 private:
  const FunctionPotential& f_;
  std::size_t K_;
};

}  // namespace

void require_hermite(const OscillatorModel& model) {
  if (!model.hermite_basis())
    throw Error("this perturbation is defined through Hermite functions; the model has no Hermite eigenbasis");
}

PanelRule potential_rule(const FunctionPotential& f, std::size_t K) {
  if (!f.V) throw Error("function potential has no callable V");
  const double X = std::max(std::sqrt(2.0 * static_cast<double>(K)) + 4.0, 12.0);
  // Products h_m h_n oscillate with frequency up to 2 sqrt(2K + 1). Eight radians
  // per panel keeps even the unsplit 16-point rule near machine precision, so the
  // split/unsplit difference is a usable error estimate.
  const double width = std::min(1.0, 8.0 / (2.0 * std::sqrt(2.0 * static_cast<double>(K) + 1.0)));

  std::vector<double> breaks{-X};
  std::vector<double> sing;
  for (double s : f.singular_points)
    if (s > -X && s < X) sing.push_back(s);
  std::sort(sing.begin(), sing.end());
  sing.erase(std::unique(sing.begin(), sing.end()), sing.end());
  for (double s : sing) breaks.push_back(s);
  breaks.push_back(X);

  std::vector<Panel> work;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    for (int j = 0; j < pieces; ++j) work.push_back({a + (b - a) * j / pieces, a + (b - a) * (j + 1) / pieces, 0});
  }

  ProxyIntegrator proxy(f, K);
  double total = 0.0;
  std::vector<double> coarse(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    coarse[i] = proxy.panel(work[i].a, work[i].b);
    total += coarse[i];
  }
  const double tol = f.tolerance * std::max(1.0, 1e-3 * total);

  std::vector<Panel> accepted;
  double residual = 0.0;
  std::vector<std::pair<Panel, double>> stack;
  for (std::size_t i = 0; i < work.size(); ++i) stack.push_back({work[i], coarse[i]});
  while (!stack.empty()) {
    auto [p, whole] = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double left = proxy.panel(p.a, m), right = proxy.panel(m, p.b);
    const double err = std::abs(left + right - whole);
    const double share = tol * (p.b - p.a) / (2.0 * X);
    if (err <= std::max(share, 1e-15 * std::abs(whole)) || m <= p.a || m >= p.b) {
      accepted.push_back(p);
    } else if (p.depth >= kMaxDepth) {
      accepted.push_back(p);
      residual += err;
    } else {
      stack.push_back({{p.a, m, p.depth + 1}, left});
      stack.push_back({{m, p.b, p.depth + 1}, right});
    }
  }
  if (residual > tol) {
    std::ostringstream os;
    os << "quadrature for " << f.label << " did not converge near a singular point (residual " << residual
       << "); the singularity is not integrable against Hermite products";
    throw QuadratureError(os.str(), residual);
  }
  std::sort(accepted.begin(), accepted.end(), [](const Panel& u, const Panel& v) { return u.a < v.a; });

  PanelRule rule;
  rule.panels = accepted.size();
  const auto& r = gl();
  auto emit = [&](double a, double b, bool fine) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int i = 0; i < kPoints; ++i) {
      rule.x.push_back(c + hw * r.x[i]);
      rule.fine.push_back(fine ? hw * r.w[i] : 0.0);
      rule.coarse.push_back(fine ? 0.0 : hw * r.w[i]);
    }
  };
  for (const auto& p : accepted) {
    const double m = 0.5 * (p.a + p.b);
    emit(p.a, p.b, false);
    emit(p.a, m, true);
    emit(m, p.b, true);
  }
  return rule;
}

}  // namespace riesz_osc::forms::detail
