// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "rmtlab/simd/kernels.hpp"

namespace rmtlab::simd::scalar {

double sum_log_sq_shift(std::span<const double> x, double eta_sq) {
  double acc = 0.0;
  for (double v : x) acc += std::log(v * v + eta_sq);
  return acc;
}

double sum_log_abs_diff(std::span<const double> re, std::span<const double> im,
                        std::complex<double> z) {
  double acc = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i) {
    const double dx = re[i] - z.real();
    const double dy = im[i] - z.imag();
    acc += std::log(dx * dx + dy * dy);
  }
  return 0.5 * acc;
}

std::complex<double> sum_chiral_resolvent(std::span<const double> lambda,
                                          std::complex<double> w) {
  // 1/(l - w) + 1/(-l - w) = 2w / (l^2 - w^2)
  const std::complex<double> w2 = w * w;
  double acc_re = 0.0;
  double acc_im = 0.0;
  for (double l : lambda) {
    const double ar = l * l - w2.real();
    const double ai = -w2.imag();
    const double inv = 1.0 / (ar * ar + ai * ai);
    acc_re += ar * inv;
    acc_im -= ai * inv;
  }
  return 2.0 * w * std::complex<double>(acc_re, acc_im);
}

void expand_add(std::span<const double> parent, std::span<const double> increment,
                std::span<double> child) {
  for (std::size_t k = 0; k < parent.size(); ++k) {
    child[2 * k] = parent[k] + increment[2 * k];
    child[2 * k + 1] = parent[k] + increment[2 * k + 1];
  }
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) return 0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

void log_array(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log(x[i]);
}

void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> out) {
  for (std::size_t k = 0; k < u1.size(); ++k) {
    const double r = std::sqrt(-2.0 * std::log(u1[k]));
    const double theta = 2.0 * std::numbers::pi * u2[k];
    out[2 * k] = r * std::cos(theta);
    out[2 * k + 1] = r * std::sin(theta);
  }
}

}  // namespace rmtlab::simd::scalar
