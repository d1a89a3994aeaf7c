// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_osc/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace riesz_osc::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;
constexpr double kE = std::numbers::e;
constexpr std::size_t kMaxN = 100'000'000;
constexpr double kMaxH = 1e6;
constexpr double kHStep = 1e-3;

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("exponent gamma must be positive");
}

void require_normalized(const OscillatorModel& model) {
  if (!model.normalized())
    throw Error("the sum estimates need a normalized model (gaps >= 1, mu_1 >= 1); rescale the operator first");
}

// Upper bound on sum_{k > K} k^{-g} / d_k when d_k >= a + gap (k - K) and also
// d_k >= (7/16) k (which |k - n|/2 gives for K >= 8n). With x0 = K - a/gap,
// 1/(x - x0) <= (1/x)(1 + (x0/K)/(1 - x0/K) * K/x) on x >= K integrates in closed form.
double tail_integral(double gamma, std::size_t K, double a, double gap) {
  const double k = double(K);
  const double kg = std::pow(k, -gamma);
  const double linear = kg / (gamma * std::max(std::min(a / k, gap), 7.0 / 16.0));
  if (!(a > 0.0)) return linear;
  const double u = std::max(0.0, (k - a / gap) / k);
  const double refined = (kg / gamma + u / (1.0 - u) * kg / (gamma + 1.0)) / gap;
  return std::min(linear, refined);
}

double shape(double two_alpha, double k) {
  return two_alpha <= 1.0 ? std::pow(k, -two_alpha) * std::log(k) : 1.0 / k;
}

std::size_t grid_index(double h) { return static_cast<std::size_t>(std::ceil((h - 1.0) / kHStep - 1e-9)); }
double grid_h(std::size_t j) { return 1.0 + double(j) * kHStep; }

}  // namespace

double sigma(double gamma, double n) {
  require_gamma(gamma);
  if (!(n > 1.0)) throw Error("sigma needs n > 1");
  return gamma <= 1.0 ? std::pow(n, -gamma) * std::log(n) : 1.0 / n;
}

double tau(double gamma, double h) {
  require_gamma(gamma);
  if (!(h > 1.0)) throw Error("tau needs h > 1");
  if (gamma < 1.0) return std::pow(h, -gamma);
  if (gamma == 1.0) return std::log(h) / h;
  return 1.0 / h;
}

// Each term below is one estimate of the n-sum divided by sigma_g(n) and
// maximized over n >= 2 (the maximum sits at n = 2 for every term).
double explicit_C(double gamma) {
  require_gamma(gamma);
  const double p = std::pow(2.0, gamma);
  if (gamma <= 1.0) {
    const double below = 2.0 / kLn2 + p / kLn2;  // 1/(n-1) and (n-1)^{-g}
    const double split = p + p;                   // near half and far half of the integral
    const double center = 1.0 / kLn2 + 1.0 / kLn2;  // k = n and k = n + 1
    const double above = 1.0 + 2.0 / (p * gamma * kLn2);
    return 2.0 * (below + split + center + above);
  }
  const double b = gamma - 1.0;
  const double below = 2.0 + 2.0;
  const double split = p / (b * kE) + 2.0 / b;
  const double center = 2.0;
  const double above = 1.0 / (b * kE) + 2.0 / (p * gamma);
  return 2.0 * (below + split + center + above);
}

double generic_sum_bound(double gamma, std::size_t n) {
  require_gamma(gamma);
  if (n < 2) throw Error("the sum estimate needs n > 1");
  const double x = double(n);
  const double p = std::pow(2.0, gamma);
  const double ln = std::log(x);
  const double xg = std::pow(x, -gamma);
  double integral;
  if (gamma < 1.0)
    integral = std::min(1.0 / (1.0 - gamma), ln) * p * xg;
  else if (gamma == 1.0)
    integral = 2.0 * ln / x;
  else
    integral = 2.0 / ((gamma - 1.0) * x);
  const double below = 1.0 / (x - 1.0) + std::pow(x - 1.0, -gamma) + p * ln * xg + integral;
  const double center = xg + std::pow(x + 1.0, -gamma);
  const double above = ln * xg + 2.0 / (p * gamma) * xg;
  return 2.0 * (below + center + above);
}

double explicit_D_min_h(double gamma) {
  require_gamma(gamma);
  return gamma == 1.0 ? 1.5 : 1.0;
}

double explicit_D(double gamma) {
  require_gamma(gamma);
  // Split at k = h: (1/h) sum_{k<=h} k^{-g} plus sum_{k>h} k^{-g-1}.
  if (gamma < 1.0) return 2.0 + 1.0 / (1.0 - gamma) + 1.0 / gamma;
  if (gamma == 1.0) {
    const double h = explicit_D_min_h(1.0);
    return 1.0 + (2.0 + 1.0 / h) / std::log(h);
  }
  return gamma / (gamma - 1.0) + 1.0 + 1.0 / gamma;
}

namespace {

// Real parts of admissible z lie in the cell of mu_n, between the midpoints to
// the neighbours. The cell is split at mu_n and each half bounded on its own:
// on the right half, mu_k for k < n is at least mu_n - mu_k away.
struct Half {
  double lo, hi;  // real-part range
};

std::array<Half, 2> cell_halves(std::size_t n, const OscillatorModel& model) {
  const double mu_n = model.mu(n);
  const double right = 0.5 * (mu_n + model.mu(n + 1));
  const double left = n > 1 ? 0.5 * (model.mu(n - 1) + mu_n) : -kInf;
  return {Half{left, mu_n}, Half{mu_n, right}};
}

// Distance from mu_k (k != n) to the real interval, floored by |k - n| / 2.
double minorant(double mu_k, std::size_t k, std::size_t n, const Half& r) {
  const double cell = mu_k > r.hi ? mu_k - r.hi : r.lo - mu_k;
  return std::max(std::abs(double(k) - double(n)) / 2.0, cell);
}

}  // namespace

SumBoundCertificate certified_sum_bound(double gamma, std::size_t n, const OscillatorModel& model, double radius) {
  require_gamma(gamma);
  require_normalized(model);
  if (n < 1) throw Error("indices start at 1");
  if (!(radius > 0.0)) throw Error("circle radius must be positive");

  const auto halves = cell_halves(n, model);
  SumBoundCertificate c;
  c.gamma = gamma;
  c.n = n;
  c.k_cut = std::max<std::size_t>(8 * n, 64);
  std::array<double, 2> s{0.0, 0.0};
  for (std::size_t k = 1; k <= c.k_cut; ++k) {
    const double w = std::pow(double(k), -gamma);
    if (k == n) {
      s[0] += w / radius;
      s[1] += w / radius;
      continue;
    }
    const double mu_k = model.mu(k);
    for (int i = 0; i < 2; ++i) s[i] += w / minorant(mu_k, k, n, halves[i]);
  }
  c.partial_sum = std::max(s[0], s[1]);
  c.tail_bound = tail_integral(gamma, c.k_cut, model.mu(c.k_cut) - halves[1].hi, model.delta_gap());
  c.total = c.partial_sum + c.tail_bound;
  return c;
}

double blocked_sum_bound(double gamma, std::size_t n, const OscillatorModel& model, double radius) {
  require_gamma(gamma);
  require_normalized(model);
  if (n < 1) throw Error("indices start at 1");
  constexpr std::size_t W = 32;
  constexpr double eps = 0.02;
  const double gap = model.delta_gap();
  const double x = double(n);
  const auto halves = cell_halves(n, model);
  // Same cut as certified_sum_bound, so this bound is never below it.
  const std::size_t k_cut = std::max<std::size_t>(8 * n, 64);
  auto block = [&](std::size_t a) { return std::max<std::size_t>(1, static_cast<std::size_t>(eps * double(a))); };

  double best = 0.0;
  for (int side = 0; side < 2; ++side) {
    // Outside the window, mu_k on the near side of the half is at least gap * j
    // away and on the far side at least gap * (j - 1/2).
    const double below_shift = side == 1 ? 0.0 : 0.5;
    const double above_shift = side == 0 ? 0.0 : 0.5;
    double s = std::pow(x, -gamma) / radius;
    const std::size_t k_lo = n > W ? n - W : 1;
    for (std::size_t k = k_lo; k <= std::min(n + W, k_cut); ++k)
      if (k != n) s += std::pow(double(k), -gamma) / minorant(model.mu(k), k, n, halves[side]);
    if (n > W + 1) {
      const std::size_t last = n - W - 1;
      const std::size_t mid = std::min(last, n / 2);
      for (std::size_t a = 1; a <= mid;) {
        const std::size_t b = std::min(mid, a + block(a) - 1);
        s += double(b - a + 1) * std::pow(double(a), -gamma) / (gap * (x - double(b) - below_shift));
        a = b + 1;
      }
      for (std::size_t ja = W + 1; ja <= n - mid - 1;) {
        const std::size_t jb = std::min(n - mid - 1, ja + block(ja) - 1);
        s += double(jb - ja + 1) * std::pow(x - double(jb), -gamma) / (gap * (double(ja) - below_shift));
        ja = jb + 1;
      }
    }
    const std::size_t j_end = k_cut - n;
    for (std::size_t ja = W + 1; ja <= j_end;) {
      const std::size_t jb = std::min(j_end, ja + block(ja) - 1);
      s += double(jb - ja + 1) * std::pow(x + double(ja), -gamma) / (gap * (double(ja) - above_shift));
      ja = jb + 1;
    }
    s += tail_integral(gamma, k_cut, gap * (double(j_end) - 0.5), gap);
    best = std::max(best, s);
  }
  return best;
}

double pointwise_sum_bound(double gamma, cplx z, const OscillatorModel& model) {
  require_gamma(gamma);
  require_normalized(model);
  const std::size_t K = std::max<std::size_t>(64, 16 * static_cast<std::size_t>(std::ceil(std::abs(z) + 1.0)));
  double s = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double d = std::abs(model.mu(k) - z);
    if (d == 0.0) throw PoleError("sum evaluated at an unperturbed eigenvalue", z);
    s += std::pow(double(k), -gamma) / d;
  }
  // mu_K >= K >= 16 |z|, so a / K >= 15/16.
  return s + tail_integral(gamma, K, model.mu(K) - z.real(), model.delta_gap());
}

double tail_sum_bound(double gamma, cplx z, const OscillatorModel& model, std::size_t K) {
  require_gamma(gamma);
  if (!(z.real() < model.mu(K + 1))) throw Error("tail_sum_bound needs Re z below mu_{K+1}");
  const std::size_t k1 = 8 * std::max<std::size_t>(K, 8);
  double s = 0.0;
  for (std::size_t k = K + 1; k <= k1; ++k) s += std::pow(double(k), -gamma) / std::abs(model.mu(k) - z);
  // mu_k - Re z >= (mu_k1 - Re z) + gap (k - k1) >= c gap k for k >= k1.
  const double gap = model.delta_gap();
  const double c = std::min(1.0, (model.mu(k1) - z.real()) / (gap * double(k1)));
  return s + std::pow(double(k1), -gamma) / (gamma * gap * c);
}

std::size_t select_N(const forms::EnvelopeFit& fit, const OscillatorModel& model) {
  require_normalized(model);
  if (!(fit.alpha > 0.0)) throw Error("select_N needs alpha > 0");
  if (fit.M_b == 0.0) return 1;
  const double gamma = 2.0 * fit.alpha;
  const double C = explicit_C(gamma);
  auto generic_ok = [&](std::size_t n) { return fit.M_b * C * sigma(gamma, double(n)) <= 0.5; };

  // sigma_g decreases for n >= e^{1/g}; beyond the first passing n there, all pass.
  std::size_t lo = 2;
  if (gamma <= 1.0) {
    const double start = std::exp(1.0 / gamma);
    if (start > double(kMaxN)) throw SearchLimitError("envelope too weak: sigma is not yet decreasing below n = 1e8");
    lo = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(start)));
  }
  std::size_t n0 = lo;
  if (!generic_ok(n0)) {
    std::size_t hi = n0;
    while (!generic_ok(hi)) {
      lo = hi;
      if (hi >= kMaxN) {
        std::ostringstream os;
        os << "envelope too weak: M_b C(2 alpha) sigma(n) stays above 1/2 for n <= 1e8 (M_b = " << fit.M_b
           << ", alpha = " << fit.alpha << ")";
        throw SearchLimitError(os.str());
      }
      hi = std::min(hi * 2, kMaxN);
    }
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      (generic_ok(mid) ? hi : lo) = mid;
    }
    n0 = hi;
  }
  // Certify n < n0 downward; the first failure is N.
  for (std::size_t n = n0 - 1; n >= 2; --n) {
    if (fit.M_b * generic_sum_bound(gamma, n) <= 0.5) continue;
    if (fit.M_b * blocked_sum_bound(gamma, n, model) <= 0.5) continue;
    if (fit.M_b * certified_sum_bound(gamma, n, model).total <= 0.5) continue;
    return n;
  }
  return 1;
}

double h_condition(const forms::EnvelopeFit& fit, std::size_t N, double h) {
  const double gamma = 2.0 * fit.alpha;
  double s = 0.0;
  for (std::size_t k = 1; k <= N + 2; ++k) s += std::pow(double(k), -gamma);
  return 2.0 * fit.M_b * (s / h + explicit_D(gamma) * tau(gamma, h));
}

double select_h(const forms::EnvelopeFit& fit, std::size_t N) {
  if (!(fit.alpha > 0.0)) throw Error("select_h needs alpha > 0");
  const double gamma = 2.0 * fit.alpha;
  const std::size_t j0 = std::max<std::size_t>(1, grid_index(explicit_D_min_h(gamma)));
  auto ok = [&](std::size_t j) { return h_condition(fit, N, grid_h(j)) <= 0.5; };
  if (fit.M_b == 0.0) return grid_h(j0);

  // The left side decreases in h except for log(h)/h on [1.5, e] at gamma = 1.
  std::size_t j = j0;
  const std::size_t j_mono = gamma == 1.0 ? grid_index(kE) : j0;
  for (; j < j_mono; ++j)
    if (ok(j)) return grid_h(j);
  if (ok(j)) return grid_h(j);
  std::size_t lo = j, hi = j;
  const std::size_t j_max = grid_index(kMaxH);
  while (!ok(hi)) {
    lo = hi;
    if (hi >= j_max) {
      std::ostringstream os;
      os << "envelope too weak: no h <= 1e6 satisfies the rectangle condition (N = " << N << ")";
      throw SearchLimitError(os.str());
    }
    hi = std::min(2 * hi + 1, j_max);
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return grid_h(hi);
}

namespace {

void run_audit(EnclosureCertificate& c, const AuditOptions& opts) {
  c.boundary_audit.clear();
  c.audit_max = 0.0;
  if (c.M_b == 0.0) return;
  const double gamma = 2.0 * c.alpha;
  auto add = [&](cplx z) {
    const double b = c.M_b * pointwise_sum_bound(gamma, z, c.model);
    c.boundary_audit.push_back({z, b});
    c.audit_max = std::max(c.audit_max, b);
  };
  const std::size_t m = std::max<std::size_t>(opts.points_per_edge, 2);
  const double x0 = -c.h, x1 = c.right_edge;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = double(i) / double(m - 1);
    const double x = x0 + (x1 - x0) * t;
    const double y = -c.h + 2.0 * c.h * t;
    add({x, c.h});
    add({x, -c.h});
    add({x0, y});
    add({x1, y});
  }
  for (std::size_t k = c.N + 2; k <= c.N + 1 + opts.circles; ++k)
    for (std::size_t i = 0; i < opts.points_per_circle; ++i) {
      const double th = 2.0 * kPi * (double(i) + 0.5) / double(opts.points_per_circle);
      add(c.model.mu(k) + std::polar(0.5, th));
    }
}

}  // namespace

EnclosureCertificate certify_enclosure(const forms::EnvelopeFit& fit, const OscillatorModel& model,
                                       const AuditOptions& opts) {
  require_normalized(model);
  EnclosureCertificate c;
  c.M_b = fit.M_b;
  c.alpha = fit.alpha;
  c.model = model;
  c.N = select_N(fit, model);
  c.h = select_h(fit, c.N);
  c.right_edge = model.mu(c.N + 1) + 0.5;
  run_audit(c, opts);
  return c;
}

std::vector<std::string> verify_certificate(const EnclosureCertificate& cert) {
  std::vector<std::string> failures;
  auto fail = [&](const std::string& s) { failures.push_back(s); };
  forms::EnvelopeFit fit;
  fit.M_b = cert.M_b;
  fit.alpha = cert.alpha;
  if (!(cert.M_b >= 0.0) || !(cert.alpha > 0.0)) {
    fail("M_b must be nonnegative and alpha positive");
    return failures;
  }
  try {
    const std::size_t N = select_N(fit, cert.model);
    if (cert.N < N) fail("N = " + std::to_string(cert.N) + " is below the least admissible N = " + std::to_string(N));
    if (cert.h < explicit_D_min_h(2.0 * cert.alpha) || !(cert.h > 1.0)) fail("h is outside the valid range");
    else if (h_condition(fit, cert.N, cert.h) > 0.5 + kSlack) fail("h does not satisfy the rectangle condition");
  } catch (const Error& e) {
    fail(e.what());
  }
  if (std::abs(cert.right_edge - (cert.model.mu(cert.N + 1) + 0.5)) > 1e-12 * cert.right_edge)
    fail("right edge is not mu_{N+1} + 1/2");
  const double gamma = 2.0 * cert.alpha;
  for (const auto& p : cert.boundary_audit) {
    const double b = cert.M_b == 0.0 ? 0.0 : cert.M_b * pointwise_sum_bound(gamma, p.z, cert.model);
    if (b > 0.5 + kSlack) {
      std::ostringstream os;
      os << "audit point " << p.z << " has bound " << b << " > 1/2";
      fail(os.str());
    } else if (std::abs(b - p.bound) > 1e-9 * std::max(1.0, b)) {
      std::ostringstream os;
      os << "audit point " << p.z << " records bound " << p.bound << " but recomputes to " << b;
      fail(os.str());
    }
  }
  return failures;
}

std::size_t nearest_index(const OscillatorModel& model, double s) {
  if (s <= model.mu(1)) return 1;
  // mu_k >= k, so the answer is at most ceil(s) + 1.
  std::size_t lo = 1, hi = static_cast<std::size_t>(std::ceil(s)) + 1;
  if (hi < 2) hi = 2;
  while (model.mu(hi) < s) hi *= 2;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (model.mu(mid) < s ? lo : hi) = mid;
  }
  return (s - model.mu(lo) <= model.mu(hi) - s) ? lo : hi;
}

RegionHit region_contains(const EnclosureCertificate& cert, cplx z) {
  if (z.real() > -cert.h && z.real() < cert.right_edge && std::abs(z.imag()) < cert.h) return {true, 0};
  const std::size_t k = nearest_index(cert.model, z.real());
  if (k > cert.N + 1 && std::abs(z - cert.model.mu(k)) < 0.5) return {true, k};
  return {false, 0};
}

double required_radius(std::size_t k, const EnclosureCertificate& cert) {
  if (cert.M_b == 0.0) return 0.0;
  const double gamma = 2.0 * cert.alpha;
  const auto c = certified_sum_bound(gamma, k, cert.model, 0.5);
  const double centre = 2.0 * std::pow(double(k), -gamma);
  const double others = c.total - centre;
  const double room = 0.5 / cert.M_b - others;
  if (!(room > 0.0)) return kInf;
  return std::pow(double(k), -gamma) / room;
}

RadiusLaw fit_radius_law(const EnclosureCertificate& cert, std::size_t k_max) {
  RadiusLaw law;
  law.two_alpha = 2.0 * cert.alpha;
  law.k_min = cert.N + 2;
  law.k_max = std::max(k_max, law.k_min);
  law.certified = true;
  for (std::size_t k = law.k_min; k <= law.k_max; ++k) {
    const double r = required_radius(k, cert);
    if (!std::isfinite(r) || r > 0.5) {
      law.certified = false;
      law.c_r = kInf;
      return law;
    }
    law.c_r = std::max(law.c_r, r / shape(law.two_alpha, double(k)));
  }
  return law;
}

double refined_radius(std::size_t k, const RadiusLaw& law) {
  if (!law.certified || k < 2) return 0.5;
  return std::min(0.5, law.c_r * shape(law.two_alpha, double(k)));
}

double schur_norm_bound(std::size_t rows, std::size_t cols, std::span<const double> entries) {
  if (entries.size() != rows * cols) throw Error("schur_norm_bound: entry count does not match the shape");
  std::vector<double> col(cols, 0.0);
  double row_max = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = entries[i * cols + j];
      if (!(v >= 0.0)) throw Error("schur_norm_bound needs nonnegative entries");
      r += v;
      col[j] += v;
    }
    row_max = std::max(row_max, r);
  }
  const double col_max = cols ? *std::max_element(col.begin(), col.end()) : 0.0;
  return std::sqrt(row_max * col_max);
}

double schur_norm_bound(const linalg::ComplexMatrix& a) {
  std::vector<double> e(a.rows() * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e[i * a.cols() + j] = std::abs(a(i, j));
  return schur_norm_bound(a.rows(), a.cols(), e);
}

}  // namespace riesz_osc::bounds
