// SPDX-License-Identifier: Apache-2.0
//
// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check (see dispatch.cpp).

#include <immintrin.h>

#include <cfloat>
#include <cmath>
#include <limits>

#include "rmtlab/simd/kernels.hpp"

namespace rmtlab::simd::avx2 {

namespace {

// Cephes log(1+x) rational approximation on [sqrt(1/2)-1, sqrt(2)-1].
constexpr double kP0 = 1.01875663804580931796E-4;
constexpr double kP1 = 4.97494994976747001425E-1;
constexpr double kP2 = 4.70579119878881725854E0;
constexpr double kP3 = 1.44989225341610930846E1;
constexpr double kP4 = 1.79368678507819816313E1;
constexpr double kP5 = 7.70838733755885391666E0;
constexpr double kQ0 = 1.12873587189167450590E1;
constexpr double kQ1 = 4.52279145837532221105E1;
constexpr double kQ2 = 8.29875266912776603211E1;
constexpr double kQ3 = 7.11544750618563894466E1;
constexpr double kQ4 = 2.31251620126765340583E1;
constexpr double kLn2Hi = 0.693359375;
constexpr double kLn2Lo = -2.121944400546905827679E-4;
constexpr double kSqrtHalf = 0.70710678118654752440;

// Natural log of four positive doubles. 0 -> -inf, +inf -> +inf.
inline __m256d log_pd(__m256d x) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  const __m256d is_inf = _mm256_cmp_pd(x, inf, _CMP_EQ_OQ);

  // Lift subnormals into the normal range.
  const __m256d is_sub = _mm256_cmp_pd(x, _mm256_set1_pd(DBL_MIN), _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(0x1p52)), is_sub);
  const __m256d e_adjust = _mm256_and_pd(is_sub, _mm256_set1_pd(-52.0));

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  const __m256d two52 = _mm256_set1_pd(0x1p52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(exp_bits, _mm256_castpd_si256(two52))), two52);
  e = _mm256_add_pd(_mm256_sub_pd(e, _mm256_set1_pd(1022.0)), e_adjust);

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3FE0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrtHalf), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, one));
  m = _mm256_add_pd(m, _mm256_and_pd(small, m));
  const __m256d f = _mm256_sub_pd(m, one);

  __m256d p = _mm256_set1_pd(kP0);
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(kP1));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(kP2));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(kP3));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(kP4));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(kP5));
  __m256d q = _mm256_add_pd(f, _mm256_set1_pd(kQ0));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(kQ1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(kQ2));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(kQ3));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(kQ4));

  const __m256d z = _mm256_mul_pd(f, f);
  __m256d y = _mm256_mul_pd(f, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d r = _mm256_add_pd(f, y);
  r = _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi), r);

  r = _mm256_blendv_pd(r, _mm256_set1_pd(-std::numeric_limits<double>::infinity()), is_zero);
  r = _mm256_blendv_pd(r, inf, is_inf);
  return r;
}

// sin and cos of theta in [0, 2 pi]: quadrant reduction by pi/2 in three
// parts, then the Cephes minimax polynomials on [-pi/4, pi/4].
inline void sincos_pd(__m256d theta, __m256d& s_out, __m256d& c_out) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(theta, _mm256_set1_pd(2.0 / 3.14159265358979323846)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d x = _mm256_fnmadd_pd(q, _mm256_set1_pd(2.0 * 7.85398125648498535156E-1), theta);
  x = _mm256_fnmadd_pd(q, _mm256_set1_pd(2.0 * 3.77489470793079817668E-8), x);
  x = _mm256_fnmadd_pd(q, _mm256_set1_pd(2.0 * 2.69515142907905952645E-15), x);
  const __m256d z = _mm256_mul_pd(x, x);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060E-10);
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-2.50507477628578072866E-8));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(2.75573136213857245213E-6));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.98412698295895385996E-4));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(8.33333333332211858878E-3));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.66666666666666307295E-1));
  const __m256d sn = _mm256_fmadd_pd(_mm256_mul_pd(x, z), ps, x);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300E-11);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(2.08757008419747316778E-9));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-2.75573141792967388112E-7));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(2.48015872888517045348E-5));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.38888888888730564116E-3));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(4.16666666666665929218E-2));
  const __m256d cs = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  const __m128i qi = _mm256_cvtpd_epi32(q);
  const __m256i q64 = _mm256_cvtepi32_epi64(qi);
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q64, one), one));
  const __m256d neg_s = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(q64, two), 62));
  const __m256d neg_c =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(q64, one), two), 62));
  s_out = _mm256_xor_pd(_mm256_blendv_pd(sn, cs, swap), neg_s);
  c_out = _mm256_xor_pd(_mm256_blendv_pd(cs, sn, swap), neg_c);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double sum_log_sq_shift(std::span<const double> x, double eta_sq) {
  const std::size_t n = x.size();
  const __m256d shift = _mm256_set1_pd(eta_sq);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    acc = _mm256_add_pd(acc, log_pd(_mm256_fmadd_pd(v, v, shift)));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += std::log(x[i] * x[i] + eta_sq);
  return total;
}

double sum_log_abs_diff(std::span<const double> re, std::span<const double> im,
                        std::complex<double> z) {
  const std::size_t n = re.size();
  const __m256d zr = _mm256_set1_pd(z.real());
  const __m256d zi = _mm256_set1_pd(z.imag());
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(re.data() + i), zr);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(im.data() + i), zi);
    acc = _mm256_add_pd(acc, log_pd(_mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy))));
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double dx = re[i] - z.real();
    const double dy = im[i] - z.imag();
    total += std::log(dx * dx + dy * dy);
  }
  return 0.5 * total;
}

std::complex<double> sum_chiral_resolvent(std::span<const double> lambda,
                                          std::complex<double> w) {
  const std::complex<double> w2 = w * w;
  const std::size_t n = lambda.size();
  const __m256d w2r = _mm256_set1_pd(w2.real());
  const __m256d ai2 = _mm256_set1_pd(w2.imag() * w2.imag());
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_inv = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d l = _mm256_loadu_pd(lambda.data() + i);
    const __m256d ar = _mm256_fmsub_pd(l, l, w2r);
    const __m256d inv = _mm256_div_pd(one, _mm256_fmadd_pd(ar, ar, ai2));
    acc_re = _mm256_fmadd_pd(ar, inv, acc_re);
    acc_inv = _mm256_add_pd(acc_inv, inv);
  }
  double sum_re = hsum(acc_re);
  double sum_inv = hsum(acc_inv);
  for (; i < n; ++i) {
    const double ar = lambda[i] * lambda[i] - w2.real();
    const double inv = 1.0 / (ar * ar + w2.imag() * w2.imag());
    sum_re += ar * inv;
    sum_inv += inv;
  }
  return 2.0 * w * std::complex<double>(sum_re, w2.imag() * sum_inv);
}

void expand_add(std::span<const double> parent, std::span<const double> increment,
                std::span<double> child) {
  const std::size_t n = parent.size();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m128d p = _mm_loadu_pd(parent.data() + k);
    const __m256d pp = _mm256_permute4x64_pd(_mm256_castpd128_pd256(p), 0b01010000);
    _mm256_storeu_pd(child.data() + 2 * k,
                     _mm256_add_pd(pp, _mm256_loadu_pd(increment.data() + 2 * k)));
  }
  for (; k < n; ++k) {
    child[2 * k] = parent[k] + increment[2 * k];
    child[2 * k + 1] = parent[k] + increment[2 * k + 1];
  }
}

std::size_t argmax(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0;
  if (n < 8) return scalar::argmax(values);
  __m256d best = _mm256_loadu_pd(values.data());
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) best = _mm256_max_pd(best, _mm256_loadu_pd(values.data() + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double top = lanes[0];
  for (int l = 1; l < 4; ++l) top = lanes[l] > top ? lanes[l] : top;
  for (; i < n; ++i) top = values[i] > top ? values[i] : top;
  const __m256d target = _mm256_set1_pd(top);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const int mask =
        _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(values.data() + j), target, _CMP_EQ_OQ));
    if (mask != 0) return j + static_cast<std::size_t>(__builtin_ctz(mask));
  }
  for (; j < n; ++j)
    if (values[j] == top) return j;
  return scalar::argmax(values);  // only reached with NaNs present
}

void log_array(std::span<const double> x, std::span<double> out) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, log_pd(_mm256_loadu_pd(x.data() + i)));
  for (; i < n; ++i) out[i] = std::log(x[i]);
}

void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> out) {
  const std::size_t n = u1.size();
  const __m256d two_pi = _mm256_set1_pd(6.28318530717958647692);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), log_pd(_mm256_loadu_pd(u1.data() + k))));
    __m256d s, c;
    sincos_pd(_mm256_mul_pd(two_pi, _mm256_loadu_pd(u2.data() + k)), s, c);
    c = _mm256_mul_pd(r, c);
    s = _mm256_mul_pd(r, s);
    const __m256d lo = _mm256_unpacklo_pd(c, s);  // c0 s0 c2 s2
    const __m256d hi = _mm256_unpackhi_pd(c, s);  // c1 s1 c3 s3
    _mm256_storeu_pd(out.data() + 2 * k, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(out.data() + 2 * k + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
  }
  if (k < n) scalar::box_muller(u1.subspan(k), u2.subspan(k), out.subspan(2 * k));
}

}  // namespace rmtlab::simd::avx2
