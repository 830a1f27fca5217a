// SPDX-License-Identifier: Apache-2.0
#pragma once

// Hierarchical Gaussian fields (dyadic branching random walks with
// piecewise-constant variance and branching rates), leading-order maximum
// predictors, Gaussian tail bounds and second-moment counting.

#include <cstdint>
#include <utility>
#include <vector>

#include "rmtlab/common.hpp"

namespace rmtlab {

struct BrwRegime {
  double span;           // fraction of the depth L
  double rate;           // variance per unit depth
  double branching = 1;  // log-leaf growth per unit depth
};

struct BrwSpec {
  double L = 0.0;
  std::vector<BrwRegime> regimes;  // coarse scales first
  std::uint64_t leaf_count = 1;    // power of two

  void validate() const;  // throws InvalidArgument
  int levels() const;     // log2(leaf_count)
  /// Number of dyadic levels assigned to each regime (proportional to span * branching).
  std::vector<int> level_split() const;
  double total_variance() const;
};

/// Rate 1, branching 1, leaf_count = 2^round(L / log 2).
BrwSpec homogeneous_spec(double L);

/// Spans (2 alpha, 1 - 2 alpha), rates (2, 1), branching (1/2, 1); leaf count
/// 2^round((1 - alpha) L / log 2).
BrwSpec two_regime_spec(double L, double alpha);

struct ExtremeStats {
  std::vector<double> maxima;                     // per trial (empty for pure counting)
  std::vector<double> thresholds;
  std::vector<std::vector<std::uint64_t>> xi;     // [trial][threshold]

  std::size_t trials() const { return xi.size() > maxima.size() ? xi.size() : maxima.size(); }
  double mean_max() const;
  double stderr_max() const;
  double mean_xi(std::size_t k) const;
  double mean_xi_sq(std::size_t k) const;
  /// (1 - theta)^2 E[Xi]^2 / E[Xi^2]; 0 when E[Xi^2] = 0.
  double paley_zygmund(std::size_t k, double theta) const;
};

/// Maximum over leaves per trial, plus leaf exceedance counts for each threshold.
/// Level increments are keyed by (seed, trial, level, block).
ExtremeStats simulate_field(const BrwSpec& spec, std::size_t trials, std::uint64_t seed,
                            const std::vector<double>& thresholds = {}, int workers = 1);

enum class MaxCase {
  complex_bulk,         // sqrt2 (sqrt(1-a-b) sqrt(1-b) - eps1)
  complex_bulk_events,  // sqrt2 (sqrt(1-a-b) sqrt(1-a) - eps1)
  real_bulk,            // sqrt2 (1 - b - 2c - a - C c^{1/3})
  complex_band,         // P-scale sqrt((1-alpha)/2)
  real_band,            // P-scale 1/sqrt2 (inhomogeneous walk)
  real_band_naive,      // P-scale sqrt((1-alpha)(1+2 alpha)/2)
};

std::string_view to_string(MaxCase c);
MaxCase parse_max_case(std::string_view s);

struct MaxExponents {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double eps1 = 0.0;
  double C = 0.0;
  double alpha = 0.25;
};

struct PredictedMax {
  double psi_scale;  // constant multiplying log n
  double p_scale;    // psi_scale / 2
};

PredictedMax predicted_max(MaxCase c, const MaxExponents& ex);

/// {(s/x - s^3/x^3), s/x} * exp(-x^2/(2 s^2)) / sqrt(2 pi). Requires x, sigma > 0.
std::pair<double, double> gaussian_tail(double x, double sigma);

/// log P[N(0,1) > x], accurate far into the tail.
double log_normal_sf(double x);

/// y[(trial * points + point) * windows + window]
struct WindowSamples {
  std::size_t trials = 0;
  std::size_t points = 0;
  std::size_t windows = 0;
  std::vector<double> y;

  double at(std::size_t t, std::size_t p, std::size_t m) const { return y[(t * points + p) * windows + m]; }
};

/// Xi = #{points with y_m >= threshold_m for every window m}, per trial.
/// The result has one threshold column; thresholds holds the first window's value.
ExtremeStats second_moment_count(const WindowSamples& values, const std::vector<double>& thresholds);

struct ExceedanceParams {
  double C1 = 1.0;
  double C2 = 2.0;
  double L = 8.0;  // plays the role of log n
};

/// -(1/L) log P[Z1 + Z2 > (sqrt2 + C2 eps) L, |Z1| <= (2 sqrt2 alpha + C1 eps) L]
/// with Var Z1 = 4 alpha L and Var Z2 = (1 - 2 alpha) L, by adaptive quadrature
/// over Z1 in log space. Requires 0 < alpha < 1/2 and eps >= 0.
double conditional_exceedance_exponent(double alpha, double eps, const ExceedanceParams& p = {});

}  // namespace rmtlab
