// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference in
// rmtlab::simd::scalar and, where the target supports it, an AVX2 variant in
// rmtlab::simd::avx2. The unqualified entry points dispatch at runtime.
//
// The ISA is chosen once per process (CPU feature probe, overridable with
// RMTLAB_SIMD=scalar|avx2), so repeated runs on one machine are
// bit-reproducible. The two variants agree to summation-order rounding only.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace rmtlab::simd {

enum class Isa { scalar, avx2 };

Isa active_isa();
std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
/// Override the dispatch target (tests, benchmarking). Throws if unavailable.
void force_isa(Isa isa);

/// sum_i log(x_i^2 + eta_sq). Zero terms give -inf.
double sum_log_sq_shift(std::span<const double> x, double eta_sq);

/// sum_i log|lambda_i - z| for eigenvalues given as separate re/im arrays.
double sum_log_abs_diff(std::span<const double> re, std::span<const double> im,
                        std::complex<double> z);

/// sum_i [1/(lambda_i - w) + 1/(-lambda_i - w)]: the full chiral resolvent
/// trace of a spectrum {+-lambda_i}.
std::complex<double> sum_chiral_resolvent(std::span<const double> lambda,
                                          std::complex<double> w);

/// child[2k + b] = parent[k] + increment[2k + b]; child and increment have
/// twice the length of parent.
void expand_add(std::span<const double> parent, std::span<const double> increment,
                std::span<double> child);

/// Index of the first maximal element; 0 for an empty span.
std::size_t argmax(std::span<const double> values);

/// Elementwise natural log (exposed for equivalence testing).
void log_array(std::span<const double> x, std::span<double> out);

/// Box-Muller on uniforms in (0, 1): out[2k] = r cos(2 pi u2[k]),
/// out[2k+1] = r sin(2 pi u2[k]), r = sqrt(-2 log u1[k]). out has 2 u1.size() slots.
void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> out);

namespace scalar {
double sum_log_sq_shift(std::span<const double> x, double eta_sq);
double sum_log_abs_diff(std::span<const double> re, std::span<const double> im,
                        std::complex<double> z);
std::complex<double> sum_chiral_resolvent(std::span<const double> lambda,
                                          std::complex<double> w);
void expand_add(std::span<const double> parent, std::span<const double> increment,
                std::span<double> child);
std::size_t argmax(std::span<const double> values);
void log_array(std::span<const double> x, std::span<double> out);
void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> out);
}  // namespace scalar

namespace avx2 {
double sum_log_sq_shift(std::span<const double> x, double eta_sq);
double sum_log_abs_diff(std::span<const double> re, std::span<const double> im,
                        std::complex<double> z);
std::complex<double> sum_chiral_resolvent(std::span<const double> lambda,
                                          std::complex<double> w);
void expand_add(std::span<const double> parent, std::span<const double> increment,
                std::span<double> child);
std::size_t argmax(std::span<const double> values);
void log_array(std::span<const double> x, std::span<double> out);
void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> out);
}  // namespace avx2

}  // namespace rmtlab::simd
