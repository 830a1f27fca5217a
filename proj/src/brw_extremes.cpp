// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/brw_extremes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/simd/kernels.hpp"

namespace rmtlab {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLn2 = std::numbers::ln2;
}  // namespace

void BrwSpec::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("L", "must be positive");
  if (regimes.empty()) throw InvalidArgument("regimes", "at least one regime required");
  double total = 0.0;
  for (const auto& r : regimes) {
    if (!(r.span > 0.0)) throw InvalidArgument("regimes.span", "must be positive");
    if (!(r.rate > 0.0)) throw InvalidArgument("regimes.rate", "must be positive");
    if (!(r.branching > 0.0)) throw InvalidArgument("regimes.branching", "must be positive");
    total += r.span;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("regimes.span", "spans must sum to 1");
  if (leaf_count == 0 || (leaf_count & (leaf_count - 1)) != 0)
    throw InvalidArgument("leaf_count", "must be a power of two");
  if (leaf_count > (std::uint64_t{1} << 30)) throw InvalidArgument("leaf_count", "exceeds 2^30");
}

int BrwSpec::levels() const { return std::countr_zero(leaf_count); }

std::vector<int> BrwSpec::level_split() const {
  const int D = levels();
  double total = 0.0;
  for (const auto& r : regimes) total += r.span * r.branching;
  std::vector<int> out;
  double cum = 0.0;
  int prev = 0;
  for (const auto& r : regimes) {
    cum += r.span * r.branching;
    const int edge = static_cast<int>(std::lround(D * cum / total));
    out.push_back(edge - prev);
    prev = edge;
  }
  return out;
}

double BrwSpec::total_variance() const {
  double v = 0.0;
  for (const auto& r : regimes) v += r.rate * r.span * L;
  return v;
}

namespace {
std::uint64_t pow2_leaves(double log_leaves) {
  const long d = std::lround(log_leaves / kLn2);
  return std::uint64_t{1} << std::clamp(d, 0L, 30L);
}
}  // namespace

BrwSpec homogeneous_spec(double L) {
  BrwSpec s;
  s.L = L;
  s.regimes = {{1.0, 1.0, 1.0}};
  s.leaf_count = pow2_leaves(L);
  return s;
}

BrwSpec two_regime_spec(double L, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidArgument("alpha", "must lie in (0, 1/2)");
  BrwSpec s;
  s.L = L;
  s.regimes = {{2.0 * alpha, 2.0, 0.5}, {1.0 - 2.0 * alpha, 1.0, 1.0}};
  s.leaf_count = pow2_leaves((1.0 - alpha) * L);
  return s;
}

// ---------------------------------------------------------------------------

double ExtremeStats::mean_max() const {
  if (maxima.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double m : maxima) s += m;
  return s / maxima.size();
}

double ExtremeStats::stderr_max() const {
  const std::size_t k = maxima.size();
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mu = mean_max();
  double ss = 0.0;
  for (double m : maxima) ss += (m - mu) * (m - mu);
  return std::sqrt(ss / (k - 1) / k);
}

double ExtremeStats::mean_xi(std::size_t k) const {
  if (xi.empty()) return 0.0;
  double s = 0.0;
  for (const auto& row : xi) s += static_cast<double>(row.at(k));
  return s / xi.size();
}

double ExtremeStats::mean_xi_sq(std::size_t k) const {
  if (xi.empty()) return 0.0;
  double s = 0.0;
  for (const auto& row : xi) {
    const double v = static_cast<double>(row.at(k));
    s += v * v;
  }
  return s / xi.size();
}

double ExtremeStats::paley_zygmund(std::size_t k, double theta) const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta", "must lie in [0, 1]");
  const double m2 = mean_xi_sq(k);
  if (m2 <= 0.0) return 0.0;
  const double m1 = mean_xi(k);
  return (1.0 - theta) * (1.0 - theta) * m1 * m1 / m2;
}

ExtremeStats simulate_field(const BrwSpec& spec, std::size_t trials, std::uint64_t seed,
                            const std::vector<double>& thresholds, int workers) {
  spec.validate();
  const int D = spec.levels();
  const std::vector<int> split = spec.level_split();

  // Per-level standard deviations; a regime without levels contributes a root offset.
  std::vector<double> level_sd;
  double root_var = 0.0;
  for (std::size_t r = 0; r < spec.regimes.size(); ++r) {
    const double v = spec.regimes[r].rate * spec.regimes[r].span * spec.L;
    if (split[r] == 0) {
      root_var += v;
      continue;
    }
    for (int l = 0; l < split[r]; ++l) level_sd.push_back(std::sqrt(v / split[r]));
  }

  ExtremeStats out;
  out.thresholds = thresholds;
  out.maxima.assign(trials, 0.0);
  out.xi.assign(trials, std::vector<std::uint64_t>(thresholds.size(), 0));

  for_each_trial(trials, workers, [&](std::size_t trial) {
    const CounterRng root_rng(seed, trial, Stream::brw, 0);
    const double root = root_var > 0.0 ? std::sqrt(root_var) * root_rng.normal_pair(0).first : 0.0;
    std::vector<double> parent{root};
    std::vector<double> child, inc;

    auto fill = [](const CounterRng& rng, double sd, std::size_t begin, std::span<double> dst) {
      // dst[i] holds the increment of node begin + i; begin is even.
      rng.normals(begin >> 1, dst);
      for (double& v : dst) v *= sd;
    };

    if (D == 0) {
      out.maxima[trial] = root;
      for (std::size_t k = 0; k < thresholds.size(); ++k) out.xi[trial][k] = root >= thresholds[k];
      return;
    }
    for (int l = 1; l < D; ++l) {
      const CounterRng rng(seed, trial, Stream::brw, static_cast<std::uint32_t>(l));
      const std::size_t width = std::size_t{1} << l;
      inc.resize(width);
      child.resize(width);
      fill(rng, level_sd[l - 1], 0, inc);
      simd::expand_add(parent, inc, child);
      parent.swap(child);
    }

    // Last level: stream through chunks, keep only the max and the counts.
    const CounterRng rng(seed, trial, Stream::brw, static_cast<std::uint32_t>(D));
    constexpr std::size_t kChunk = 4096;
    double best = -std::numeric_limits<double>::infinity();
    auto& counts = out.xi[trial];
    const std::size_t np = parent.size();
    for (std::size_t p0 = 0; p0 < np; p0 += kChunk / 2) {
      const std::size_t pn = std::min(kChunk / 2, np - p0);
      inc.resize(2 * pn);
      child.resize(2 * pn);
      fill(rng, level_sd[D - 1], 2 * p0, inc);
      simd::expand_add(std::span<const double>(parent).subspan(p0, pn), inc, child);
      best = std::max(best, child[simd::argmax(child)]);
      for (std::size_t k = 0; k < thresholds.size(); ++k)
        for (double v : child) counts[k] += v >= thresholds[k];
    }
    out.maxima[trial] = best;
  });
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(MaxCase c) {
  switch (c) {
    case MaxCase::complex_bulk: return "complex-bulk";
    case MaxCase::complex_bulk_events: return "complex-bulk-events";
    case MaxCase::real_bulk: return "real-bulk";
    case MaxCase::complex_band: return "complex-band";
    case MaxCase::real_band: return "real-band";
    case MaxCase::real_band_naive: return "real-band-naive";
  }
  return "?";
}

MaxCase parse_max_case(std::string_view s) {
  for (MaxCase c : {MaxCase::complex_bulk, MaxCase::complex_bulk_events, MaxCase::real_bulk,
                    MaxCase::complex_band, MaxCase::real_band, MaxCase::real_band_naive})
    if (to_string(c) == s) return c;
  throw InvalidArgument("case", "unknown maximum case");
}

PredictedMax predicted_max(MaxCase c, const MaxExponents& ex) {
  auto check_ab = [&] {
    if (ex.a < 0.0 || ex.b < 0.0 || ex.a + ex.b >= 1.0) throw InvalidArgument("exponents", "need a, b >= 0, a + b < 1");
    if (ex.eps1 < 0.0) throw InvalidArgument("eps1", "must be >= 0");
  };
  auto check_alpha = [&] {
    if (!(ex.alpha > 0.0 && ex.alpha < 0.5)) throw InvalidArgument("alpha", "must lie in (0, 1/2)");
  };
  double psi = 0.0;
  switch (c) {
    case MaxCase::complex_bulk:
      check_ab();
      psi = kSqrt2 * (std::sqrt(1.0 - ex.a - ex.b) * std::sqrt(1.0 - ex.b) - ex.eps1);
      break;
    case MaxCase::complex_bulk_events:
      check_ab();
      psi = kSqrt2 * (std::sqrt(1.0 - ex.a - ex.b) * std::sqrt(1.0 - ex.a) - ex.eps1);
      break;
    case MaxCase::real_bulk:
      check_ab();
      if (ex.c < 0.0 || ex.C < 0.0) throw InvalidArgument("exponents", "need c, C >= 0");
      psi = kSqrt2 * (1.0 - ex.b - 2.0 * ex.c - ex.a - ex.C * std::cbrt(ex.c));
      break;
    case MaxCase::complex_band:
      check_alpha();
      psi = 2.0 * std::sqrt((1.0 - ex.alpha) / 2.0);
      break;
    case MaxCase::real_band:
      check_alpha();
      psi = kSqrt2;
      break;
    case MaxCase::real_band_naive:
      check_alpha();
      psi = 2.0 * std::sqrt((1.0 - ex.alpha) * (1.0 + 2.0 * ex.alpha) / 2.0);
      break;
  }
  return {psi, psi / 2.0};
}

std::pair<double, double> gaussian_tail(double x, double sigma) {
  if (!(x > 0.0)) throw InvalidArgument("x", "must be positive");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma", "must be positive");
  const double r = sigma / x;
  const double g = std::exp(-0.5 * x * x / (sigma * sigma)) / std::sqrt(2.0 * std::numbers::pi);
  return {(r - r * r * r) * g, r * g};
}

double log_normal_sf(double x) {
  if (x < 30.0) return std::log(0.5 * std::erfc(x / kSqrt2));
  // Mills ratio by continued fraction: R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))).
  double f = x;
  for (int k = 40; k >= 1; --k) f = x + k / f;
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(f);
}

ExtremeStats second_moment_count(const WindowSamples& values, const std::vector<double>& thresholds) {
  if (thresholds.size() != values.windows)
    throw InvalidArgument("thresholds", "need one threshold per window");
  if (values.y.size() != values.trials * values.points * values.windows)
    throw InvalidArgument("values", "size does not match trials * points * windows");
  ExtremeStats out;
  if (!thresholds.empty()) out.thresholds = {thresholds.front()};
  out.xi.assign(values.trials, std::vector<std::uint64_t>(1, 0));
  for (std::size_t t = 0; t < values.trials; ++t) {
    std::uint64_t count = 0;
    for (std::size_t p = 0; p < values.points; ++p) {
      bool all = true;
      for (std::size_t m = 0; m < values.windows && all; ++m) all = values.at(t, p, m) >= thresholds[m];
      count += all;
    }
    out.xi[t][0] = count;
  }
  return out;
}

double conditional_exceedance_exponent(double alpha, double eps, const ExceedanceParams& p) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidArgument("alpha", "must lie in (0, 1/2)");
  if (!(eps >= 0.0)) throw InvalidArgument("eps", "must be >= 0");
  if (!(p.L > 0.0)) throw InvalidArgument("L", "must be positive");
  const double L = p.L;
  const double s1 = std::sqrt(4.0 * alpha * L);
  const double s2 = std::sqrt((1.0 - 2.0 * alpha) * L);
  const double target = (kSqrt2 + p.C2 * eps) * L;
  const double A = (2.0 * kSqrt2 * alpha + p.C1 * eps) * L;
  if (!(A > 0.0)) throw InvalidArgument("eps", "empty constraint set");

  // log of the integrand in u = z1 / s1
  auto log_f = [&](double u) {
    return -0.5 * u * u - 0.5 * std::log(2.0 * std::numbers::pi) + log_normal_sf((target - s1 * u) / s2);
  };
  const double lo = -A / s1;
  const double hi = A / s1;
  double peak = -std::numeric_limits<double>::infinity();
  constexpr int kScan = 2048;
  for (int k = 0; k <= kScan; ++k) peak = std::max(peak, log_f(lo + (hi - lo) * k / kScan));
  if (!std::isfinite(peak)) throw NumericalFailure("conditional exceedance integrand underflows");

  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double integral = gauss_kronrod<double, 61>::integrate(
      [&](double u) { return std::exp(log_f(u) - peak); }, lo, hi, 15, 1e-12, &err);
  if (!(integral > 0.0) || !std::isfinite(integral) || err > 1e-6 * integral)
    throw NumericalFailure("conditional exceedance quadrature did not converge");
  return -(peak + std::log(integral)) / L;
}

}  // namespace rmtlab
