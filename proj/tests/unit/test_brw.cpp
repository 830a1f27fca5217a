#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rmtlab/brw_extremes.hpp"

using namespace rmtlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Window samples with the block-coupling rule on a dyadic mesh of 2^levels
// points: window m is constant on blocks of 2^{block_bits[m]} consecutive points.
WindowSamples dyadic_windows(int levels, const std::vector<int>& block_bits, const std::vector<double>& sd,
                             std::mt19937_64& gen) {
  WindowSamples s;
  s.trials = 1;
  s.points = std::size_t{1} << levels;
  s.windows = sd.size();
  s.y.resize(s.points * s.windows);
  std::normal_distribution<double> nd;
  for (std::size_t m = 0; m < s.windows; ++m) {
    const std::size_t block = std::size_t{1} << block_bits[m];
    double g = 0;
    for (std::size_t p = 0; p < s.points; ++p) {
      if (p % block == 0) g = sd[m] * nd(gen);
      s.y[p * s.windows + m] = g;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("BrwSpec validation and level split") {
  BrwSpec s = homogeneous_spec(8.0);
  CHECK(s.leaf_count == (std::uint64_t{1} << 12));
  CHECK(s.total_variance() == doctest::Approx(8.0));
  s.leaf_count = 3;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = homogeneous_spec(8.0);
  s.regimes[0].span = 0.9;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = homogeneous_spec(8.0);
  s.regimes[0].rate = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  CHECK_THROWS_AS(homogeneous_spec(-1.0).validate(), InvalidArgument);

  const BrwSpec t = two_regime_spec(14.0, 0.25);
  CHECK(t.total_variance() == doctest::Approx(2 * 0.5 * 14 + 0.5 * 14));
  const auto split = t.level_split();
  REQUIRE(split.size() == 2);
  CHECK(split[0] + split[1] == t.levels());
  // log-leaf budget: regime 1 carries 2 alpha * 1/2 of (1 - alpha)
  CHECK(static_cast<double>(split[0]) / t.levels() == doctest::Approx(0.25 / 0.75).epsilon(0.15));
  CHECK_THROWS_AS(two_regime_spec(10.0, 0.5), InvalidArgument);
}

TEST_CASE("one level, one leaf: a plain Gaussian") {
  BrwSpec s;
  s.L = 3.0;
  s.regimes = {{0.5, 2.0, 1.0}, {0.5, 1.0, 1.0}};
  s.leaf_count = 1;
  const ExtremeStats st = simulate_field(s, 20000, 5, {0.0});
  CHECK(st.trials() == 20000);
  const double v = oracle::var(st.maxima);
  CHECK(v == doctest::Approx(s.total_variance()).epsilon(0.04));
  CHECK(std::abs(st.mean_max()) < 5 * std::sqrt(v / 20000));
  CHECK(st.mean_xi(0) == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("sibling leaves share all but the last level") {
  // first regime gets no dyadic level and acts as a common offset
  BrwSpec s;
  s.L = 4.0;
  s.regimes = {{0.5, 1.0, 1e-9}, {0.5, 1.0, 1.0}};
  s.leaf_count = 2;
  REQUIRE(s.level_split()[0] == 0);
  const std::size_t trials = 40000;
  const ExtremeStats st = simulate_field(s, trials, 6, {0.0});
  // corr = 1 - last/total = 1/2: P[both >= 0] = 1/4 + asin(1/2)/(2 pi) = 1/3
  CHECK(st.mean_xi(0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(st.mean_xi_sq(0) == doctest::Approx(5.0 / 3.0).epsilon(0.02));
  // E max = E max(e1, e2) = sd_last / sqrt(pi)
  CHECK(st.mean_max() == doctest::Approx(std::sqrt(2.0) / std::sqrt(std::numbers::pi)).epsilon(0.05));
}

TEST_CASE("simulate_field is reproducible across worker counts") {
  const BrwSpec s = two_regime_spec(8.0, 0.25);
  const ExtremeStats a = simulate_field(s, 12, 9, {1.0, 5.0}, 1);
  const ExtremeStats b = simulate_field(s, 12, 9, {1.0, 5.0}, 4);
  CHECK(a.maxima == b.maxima);
  CHECK(a.xi == b.xi);
  // thresholds ordered: counts nonincreasing
  for (const auto& row : a.xi) CHECK(row[0] >= row[1]);
}

TEST_CASE("homogeneous field: first-order maximum") {
  const ExtremeStats st = simulate_field(homogeneous_spec(12.0), 200, 12);
  const double r = st.mean_max() / 12.0;
  MESSAGE("mean max / L at L=12: " << r);
  CHECK(r >= 1.1);
  CHECK(r <= 1.45);
  CHECK(r < std::numbers::sqrt2);
}

TEST_CASE("predicted_max") {
  CHECK(predicted_max(MaxCase::complex_bulk, {}).psi_scale == doctest::Approx(std::numbers::sqrt2));
  CHECK(predicted_max(MaxCase::complex_bulk, {}).p_scale == doctest::Approx(1 / std::numbers::sqrt2));
  CHECK(predicted_max(MaxCase::complex_bulk_events, {}).psi_scale == doctest::Approx(std::numbers::sqrt2));
  CHECK(predicted_max(MaxCase::real_bulk, {}).psi_scale == doctest::Approx(std::numbers::sqrt2));
  MaxExponents ex;
  ex.alpha = 0.25;
  CHECK(predicted_max(MaxCase::complex_band, ex).p_scale == doctest::Approx(0.61237).epsilon(1e-5));
  CHECK(predicted_max(MaxCase::real_band_naive, ex).p_scale == doctest::Approx(0.75));
  CHECK(predicted_max(MaxCase::real_band, ex).p_scale == doctest::Approx(1 / std::numbers::sqrt2));
  for (double alpha : {0.05, 0.2, 0.45}) {
    ex.alpha = alpha;
    CHECK(predicted_max(MaxCase::real_band_naive, ex).p_scale > predicted_max(MaxCase::real_band, ex).p_scale);
    CHECK(predicted_max(MaxCase::complex_band, ex).p_scale < predicted_max(MaxCase::real_band, ex).p_scale);
  }
  MaxExponents ab;
  ab.a = 0.1;
  ab.b = 0.2;
  CHECK(predicted_max(MaxCase::complex_bulk, ab).psi_scale ==
        doctest::Approx(std::numbers::sqrt2 * std::sqrt(0.7) * std::sqrt(0.8)));
  CHECK(predicted_max(MaxCase::complex_bulk_events, ab).psi_scale ==
        doctest::Approx(std::numbers::sqrt2 * std::sqrt(0.7) * std::sqrt(0.9)));
  ab.a = 0.6;
  ab.b = 0.5;
  CHECK_THROWS_AS(predicted_max(MaxCase::complex_bulk, ab), InvalidArgument);
  ex.alpha = 0.0;
  CHECK_THROWS_AS(predicted_max(MaxCase::complex_band, ex), InvalidArgument);
  for (MaxCase c : {MaxCase::complex_bulk, MaxCase::real_band_naive}) CHECK(parse_max_case(to_string(c)) == c);
}

TEST_CASE("gaussian_tail") {
  const auto [lo1, hi1] = gaussian_tail(1.0, 1.0);
  CHECK(hi1 == doctest::Approx(0.24197).epsilon(1e-4));
  CHECK(lo1 == 0.0);
  CHECK(oracle::normal_sf(1.0) == doctest::Approx(0.15866).epsilon(1e-4));
  const auto [lo3, hi3] = gaussian_tail(3.0, 1.0);
  const double p3 = oracle::normal_sf(3.0);
  CHECK(p3 == doctest::Approx(1.3499e-3).epsilon(1e-4));
  CHECK(lo3 <= p3);
  CHECK(p3 <= hi3);
  CHECK(gaussian_tail(0.5, 1.0).first < 0.0);
  CHECK_THROWS_AS(gaussian_tail(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(gaussian_tail(1.0, 0.0), InvalidArgument);

  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> us(0.1, 5.0), ur(1.0, 8.0);
  for (int k = 0; k < 1000; ++k) {
    const double sigma = us(gen);
    const double x = sigma * ur(gen);
    const auto [lo, hi] = gaussian_tail(x, sigma);
    const double p = oracle::normal_sf(x / sigma);
    CHECK(lo <= p * (1 + 1e-12));
    CHECK(p <= hi * (1 + 1e-12));
  }
}

TEST_CASE("log_normal_sf far tail") {
  for (double x : {0.0, 1.0, 5.0, 20.0, 29.9}) CHECK(log_normal_sf(x) == doctest::Approx(std::log(oracle::normal_sf(x))));
  // continuity at the switch and asymptotics beyond it
  CHECK(log_normal_sf(30.0) == doctest::Approx(std::log(oracle::normal_sf(30.0))).epsilon(1e-10));
  const double x = 100.0;
  CHECK(log_normal_sf(x) ==
        doctest::Approx(-0.5 * x * x - std::log(x) - 0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-6));
}

TEST_CASE("second_moment_count") {
  std::mt19937_64 gen(23);
  WindowSamples s;
  s.trials = 30;
  s.points = 40;
  s.windows = 3;
  std::normal_distribution<double> nd;
  for (std::size_t k = 0; k < s.trials * s.points * s.windows; ++k) s.y.push_back(nd(gen));

  const ExtremeStats all = second_moment_count(s, {-kInf, -kInf, -kInf});
  for (const auto& row : all.xi) CHECK(row[0] == s.points);
  CHECK(all.paley_zygmund(0, 0.3) == doctest::Approx(0.49));
  const ExtremeStats none = second_moment_count(s, {kInf, kInf, kInf});
  for (const auto& row : none.xi) CHECK(row[0] == 0);
  CHECK(none.paley_zygmund(0, 0.3) == 0.0);
  CHECK_THROWS_AS(second_moment_count(s, {0.0}), InvalidArgument);
  CHECK_THROWS_AS(all.paley_zygmund(0, 1.5), InvalidArgument);

  // monotone nonincreasing in every threshold
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> th{u(gen), u(gen), u(gen)};
    const ExtremeStats base = second_moment_count(s, th);
    const std::size_t m = rep % 3;
    th[m] += 0.3;
    const ExtremeStats raised = second_moment_count(s, th);
    for (std::size_t t = 0; t < s.trials; ++t) CHECK(raised.xi[t][0] <= base.xi[t][0]);
  }
}

TEST_CASE("second moment ratio on the block-coupled surrogate, K=4, L=14") {
  // a = b = 0.1: 2^levels ~ n^{1-a} points, window m constant on blocks at
  // the geometric-mean scale of the window, variance delta L per window.
  const double L = 14.0, a = 0.1, b = 0.1;
  const int K = 4;
  const double delta = (1 - a - b) / K;
  const double log2n = L / std::numbers::ln2;
  const int levels = static_cast<int>(std::lround((1 - a) * log2n));
  std::vector<int> bits;
  for (int m = 0; m < K; ++m) {
    const double blocks = (b + (m + 0.5) * delta) * log2n;
    bits.push_back(std::max(0, levels - static_cast<int>(std::lround(blocks))));
  }
  const std::vector<double> sd(K, std::sqrt(delta * L));
  // finite L needs a large eps1: at 0.35 E[Xi] ~ 6 and the ratio is ~3.8
  const double eps1 = 0.45;
  const double xhat = std::numbers::sqrt2 / K * (std::sqrt(1 - a - b) * std::sqrt(1 - a) - eps1) * L;
  const std::vector<double> th(K, xhat);

  std::mt19937_64 gen(2024);
  ExtremeStats total;
  const std::size_t trials = 300;
  for (std::size_t t = 0; t < trials; ++t) {
    const ExtremeStats one = second_moment_count(dyadic_windows(levels, bits, sd, gen), th);
    total.xi.push_back(one.xi[0]);
  }
  const double m1 = total.mean_xi(0);
  const double ratio = total.mean_xi_sq(0) / (m1 * m1);
  const double p = oracle::normal_sf(xhat / sd[0]);
  MESSAGE("E[Xi] = " << m1 << " (first moment " << std::ldexp(std::pow(p, K), levels) << "), ratio " << ratio);
  CHECK(m1 == doctest::Approx(std::ldexp(std::pow(p, K), levels)).epsilon(0.25));
  CHECK(ratio <= 2.0);
  CHECK(total.paley_zygmund(0, 0.5) >= 0.125);
}

TEST_CASE("conditional exceedance exponent") {
  for (double alpha : {0.1, 0.25, 0.4}) {
    const double e = conditional_exceedance_exponent(alpha, 0.0);
    MESSAGE("alpha " << alpha << " exponent " << e);
    CHECK(e >= 1 - alpha);
  }
  // alpha -> 0: only the homogeneous tail remains
  ExceedanceParams big;
  big.L = 1e4;
  CHECK(conditional_exceedance_exponent(1e-6, 0.0, big) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(conditional_exceedance_exponent(0.25, 0.0, big) >= 0.75);

  // increasing in eps
  CHECK(conditional_exceedance_exponent(0.25, 0.01) > conditional_exceedance_exponent(0.25, 0.0));
  CHECK_THROWS_AS(conditional_exceedance_exponent(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(conditional_exceedance_exponent(0.25, -1.0), InvalidArgument);

  const ExceedanceParams p;
  const double alpha = 0.25, eps = 1e-3;
  const double quad = conditional_exceedance_exponent(alpha, eps, p);
  const double mc = -oracle::log_exceedance_mc(4 * alpha * p.L, (1 - 2 * alpha) * p.L,
                                               (std::numbers::sqrt2 + p.C2 * eps) * p.L,
                                               (2 * std::numbers::sqrt2 * alpha + p.C1 * eps) * p.L, 10000000, 31) /
                    p.L;
  MESSAGE("quadrature " << quad << " monte carlo " << mc);
  CHECK(std::abs(quad - mc) < 0.005);
}
