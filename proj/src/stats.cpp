// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rmtlab/common.hpp"

namespace rmtlab {

double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("samples", "empty");
  double s = 0.0;
  for (double v : x) s += v;
  return s / x.size();
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw InvalidArgument("samples", "need at least 2");
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / (x.size() - 1);
}

Estimate empirical_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("samples", "paired columns differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("samples", "need at least 2 pairs");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy += (x[i] - mx) * (y[i] - my);
  const double cov = sxy / (n - 1);
  if (n < 3) return {cov, std::numeric_limits<double>::quiet_NaN(), n};

  // Leave-one-out covariances from running sums.
  const double sx = mx * n;
  const double sy = my * n;
  double sxy_raw = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy_raw += x[i] * y[i];
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = n - 1.0;
    const double ax = (sx - x[i]) / m;
    const double ay = (sy - y[i]) / m;
    loo[i] = (sxy_raw - x[i] * y[i] - m * ax * ay) / (m - 1.0);
    loo_mean += loo[i];
  }
  loo_mean /= n;
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  return {cov, std::sqrt((n - 1.0) / n * ss), n};
}

Estimate empirical_variance(std::span<const double> x) { return empirical_covariance(x, x); }

double kolmogorov_sf(double d, std::size_t n) {
  if (d <= 0.0) return 1.0;
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult normality_test(std::span<const double> x, double expected_mean, double expected_var) {
  if (x.size() < 100) throw InvalidArgument("samples", "need at least 100");
  if (!(expected_var > 0.0)) throw InvalidArgument("expected_var", "must be positive");
  const double sd = std::sqrt(expected_var);
  std::vector<double> z(x.begin(), x.end());
  for (double& v : z) v = (v - expected_mean) / sd;
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = 0.5 * std::erfc(-z[i] / std::numbers::sqrt2);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, kolmogorov_sf(d, z.size()), z.size()};
}

double quantile_of(std::vector<double> x, double q) {
  if (x.empty()) throw InvalidArgument("samples", "empty");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q", "must lie in [0, 1]");
  std::sort(x.begin(), x.end());
  const double h = q * (x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - lo) * (x[hi] - x[lo]);
}

}  // namespace rmtlab
