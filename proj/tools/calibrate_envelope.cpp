// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force maximization of |h_n(x)| / regime_bound(n, x) used to pick the
// default envelope constant. Prints the maximizing (n, x, regime) per regime.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>

#include "riesz_osc/hermite.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the Hermite envelope constant"};
  unsigned nmax = 500;
  double step = 0.002;
  double xi = riesz_osc::hermite::kCalibratedEnvelope.xi;
  app.add_option("--nmax", nmax, "largest Hermite index");
  app.add_option("--step", step, "x grid spacing");
  app.add_option("--xi", xi, "tail decay rate");
  CLI11_PARSE(app, argc, argv);

  namespace h = riesz_osc::hermite;
  struct Best {
    double ratio = 0.0;
    unsigned n = 0;
    double x = 0.0;
  };
  Best best[5];
  const double xmax = std::sqrt(2.0 * (2.0 * nmax + 1.0)) + 8.0;
  for (double x = 0.0; x <= xmax; x += step) {
    const auto vals = h::eval_all(nmax, x);
    for (unsigned n = 0; n <= nmax; ++n) {
      const double r = std::abs(vals[n]) / h::regime_bound(n, x, xi);
      auto& b = best[static_cast<int>(h::regime(n, x))];
      if (r > b.ratio) b = {r, n, x};
    }
  }
  double overall = 0.0;
  for (int k = 1; k <= 4; ++k) {
    std::printf("regime %d: max ratio %.6f at n=%u x=%.4f\n", k, best[k].ratio, best[k].n, best[k].x);
    overall = std::max(overall, best[k].ratio);
  }
  std::printf("c_env >= %.6f (xi = %.4f)\n", overall, xi);
  return 0;
}
