#pragma once
// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's numerical code.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Stieltjes transform of the semicircle on [-2, 2], branch with Im m Im w > 0.
inline cplx semicircle_m(cplx w) {
  const cplx s = std::sqrt(w * w - 4.0);
  cplx m = 0.5 * (-w + s);
  if (m.imag() * w.imag() <= 0.0) m = 0.5 * (-w - s);
  return m;
}

inline double semicircle_density(double x) {
  return std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi) : 0.0;
}

// int_0^x of the semicircle density, |x| <= 2
inline double semicircle_cdf0(double x) {
  return (0.5 * x * std::sqrt(4.0 - x * x) + 2.0 * std::asin(0.5 * x)) / (2.0 * std::numbers::pi);
}

inline double semicircle_quantile(double mass) {
  double lo = 0.0, hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (semicircle_cdf0(mid) < mass ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Determinant of a small complex matrix by Gaussian elimination with partial
// pivoting, returning log|det|.
inline double log_abs_det(std::vector<cplx> a, int n) {
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
    const cplx piv = a[k * n + k];
    if (piv == 0.0) return -INFINITY;
    acc += std::log(std::abs(piv));
    for (int i = k + 1; i < n; ++i) {
      const cplx f = a[i * n + k] / piv;
      for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return acc;
}

// P[Z1 + Z2 > target, |Z1| <= A] for independent centred Gaussians, estimated
// by exponentially tilted sampling (both coordinates shifted towards the
// dominant point). Returns log of the estimate.
inline double log_exceedance_mc(double var1, double var2, double target, double A, std::size_t samples,
                                std::uint64_t seed) {
  const double s1 = std::sqrt(var1), s2 = std::sqrt(var2);
  double mu1 = target * var1 / (var1 + var2);
  if (mu1 > A) mu1 = A;
  const double mu2 = target - mu1;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  long double acc = 0.0L;
  for (std::size_t k = 0; k < samples; ++k) {
    const double z1 = mu1 + s1 * nd(gen);
    const double z2 = mu2 + s2 * nd(gen);
    if (std::abs(z1) > A || z1 + z2 <= target) continue;
    // density ratio N(0,v)/N(mu,v) = exp(-(2 z mu - mu^2) / (2 v))
    const double lw = -(2.0 * z1 * mu1 - mu1 * mu1) / (2.0 * var1) - (2.0 * z2 * mu2 - mu2 * mu2) / (2.0 * var2);
    acc += std::exp(static_cast<long double>(lw));
  }
  return std::log(static_cast<double>(acc / samples));
}

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / x.size();
}

inline double var(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

}  // namespace oracle
