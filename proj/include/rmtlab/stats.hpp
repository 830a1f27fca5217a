// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace rmtlab {

struct Estimate {
  double value;
  double stderr_;  // jackknife / analytic standard error
  std::size_t count;
};

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);

/// Unbiased sample covariance of paired samples with a jackknife standard
/// error. Requires at least 2 pairs of equal length.
Estimate empirical_covariance(std::span<const double> x, std::span<const double> y);

/// Sample variance with its jackknife standard error.
Estimate empirical_variance(std::span<const double> x);

struct KsResult {
  double statistic;
  double p_value;
  std::size_t count;
};

/// P[K > sqrt(n) d] for the Kolmogorov limit law with the
/// Stephens small-sample correction sqrt(n) + 0.12 + 0.11/sqrt(n).
double kolmogorov_sf(double d, std::size_t n);

/// KS test of (x - expected_mean)/sqrt(expected_var) against N(0, 1).
/// Requires at least 100 samples.
KsResult normality_test(std::span<const double> x, double expected_mean, double expected_var);

/// Quantile with linear interpolation between order statistics (type 7).
double quantile_of(std::vector<double> x, double q);

}  // namespace rmtlab
