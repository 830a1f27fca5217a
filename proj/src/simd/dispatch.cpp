// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rmtlab/simd/kernels.hpp"

namespace rmtlab::simd {

namespace {

bool cpu_has_avx2() {
#if defined(RMTLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  const bool avx2_ok = cpu_has_avx2();
  if (const char* env = std::getenv("RMTLAB_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && avx2_ok) return Isa::avx2;
  }
  return avx2_ok ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) throw std::runtime_error("requested ISA not available on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

#if defined(RMTLAB_HAVE_AVX2)
#define RMTLAB_DISPATCH(fn, ...) \
  (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define RMTLAB_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double sum_log_sq_shift(std::span<const double> x, double eta_sq) {
  return RMTLAB_DISPATCH(sum_log_sq_shift, x, eta_sq);
}

double sum_log_abs_diff(std::span<const double> re, std::span<const double> im,
                        std::complex<double> z) {
  return RMTLAB_DISPATCH(sum_log_abs_diff, re, im, z);
}

std::complex<double> sum_chiral_resolvent(std::span<const double> lambda,
                                          std::complex<double> w) {
  return RMTLAB_DISPATCH(sum_chiral_resolvent, lambda, w);
}

void expand_add(std::span<const double> parent, std::span<const double> increment,
                std::span<double> child) {
  RMTLAB_DISPATCH(expand_add, parent, increment, child);
}

std::size_t argmax(std::span<const double> values) { return RMTLAB_DISPATCH(argmax, values); }

void log_array(std::span<const double> x, std::span<double> out) {
  RMTLAB_DISPATCH(log_array, x, out);
}

void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> out) {
  RMTLAB_DISPATCH(box_muller, u1, u2, out);
}

#undef RMTLAB_DISPATCH

}  // namespace rmtlab::simd
