#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "rmtlab/simd/kernels.hpp"

using namespace rmtlab;
namespace sk = rmtlab::simd;

namespace {

std::vector<double> randn(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

std::vector<double> randu(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> d(1e-300, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

const std::size_t kLengths[] = {0, 1, 3, 4, 5, 8, 15, 16, 17, 31, 64, 127, 1000, 4099};

bool have_avx2() { return sk::isa_available(sk::Isa::avx2); }

}  // namespace

TEST_CASE("dispatch reports an available ISA and can be forced") {
  CHECK(sk::isa_available(sk::Isa::scalar));
  CHECK(sk::isa_available(sk::active_isa()));
  sk::force_isa(sk::Isa::scalar);
  CHECK(sk::active_isa() == sk::Isa::scalar);
  CHECK(sk::isa_name(sk::Isa::scalar) == "scalar");
  if (have_avx2()) {
    sk::force_isa(sk::Isa::avx2);
    CHECK(sk::active_isa() == sk::Isa::avx2);
  }
}

TEST_CASE("scalar kernels against direct loops") {
  const std::vector<double> x{0.5, -1.0, 2.0};
  CHECK(sk::scalar::sum_log_sq_shift(x, 0.01) ==
        doctest::Approx(std::log(0.26) + std::log(1.01) + std::log(4.01)));
  const std::vector<double> re{0.0, 1.0}, im{0.0, 1.0};
  CHECK(sk::scalar::sum_log_abs_diff(re, im, {1.0, 0.0}) == doctest::Approx(0.0));
  // 1/(1 - i) + 1/(-1 - i) = (1 + i)/2 + (-1 + i)/2 = i
  const std::vector<double> one{1.0};
  const auto g = sk::scalar::sum_chiral_resolvent(one, {0.0, 1.0});
  CHECK(g.real() == doctest::Approx(0.0));
  CHECK(g.imag() == doctest::Approx(1.0));
  const std::vector<double> zeros{0.0};
  CHECK(std::isinf(sk::scalar::sum_log_sq_shift(zeros, 0.0)));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!have_avx2()) return;
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto x = randn(n, 100 + n);
    const auto y = randn(n, 200 + n);
    const double tol = 1e-13 * (1.0 + n);

    CHECK(sk::avx2::sum_log_sq_shift(x, 1e-3) ==
          doctest::Approx(sk::scalar::sum_log_sq_shift(x, 1e-3)).epsilon(tol).scale(1.0));

    const std::complex<double> z(0.3, -0.2);
    CHECK(sk::avx2::sum_log_abs_diff(x, y, z) ==
          doctest::Approx(sk::scalar::sum_log_abs_diff(x, y, z)).epsilon(tol).scale(1.0));

    const std::complex<double> w(0.1, 0.05);
    const auto ga = sk::avx2::sum_chiral_resolvent(x, w);
    const auto gs = sk::scalar::sum_chiral_resolvent(x, w);
    CHECK(std::abs(ga - gs) <= tol * (1.0 + std::abs(gs)) * 10.0);

    std::vector<double> la(n), ls(n);
    auto pos = x;
    for (auto& v : pos) v = std::abs(v) + 1e-12;
    sk::avx2::log_array(pos, la);
    sk::scalar::log_array(pos, ls);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(la[i] == doctest::Approx(ls[i]).epsilon(1e-15).scale(1.0));

    CHECK(sk::avx2::argmax(x) == sk::scalar::argmax(x));

    const auto inc = randn(2 * n, 300 + n);
    std::vector<double> ca(2 * n), cs(2 * n);
    sk::avx2::expand_add(x, inc, ca);
    sk::scalar::expand_add(x, inc, cs);
    CHECK(ca == cs);  // one add per element: bitwise equal

    const auto u1 = randu(n, 400 + n);
    const auto u2 = randu(n, 500 + n);
    std::vector<double> ba(2 * n), bs(2 * n);
    sk::avx2::box_muller(u1, u2, ba);
    sk::scalar::box_muller(u1, u2, bs);
    for (std::size_t i = 0; i < 2 * n; ++i) REQUIRE(ba[i] == doctest::Approx(bs[i]).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("avx2 log over extreme ranges") {
  if (!have_avx2()) return;
  std::vector<double> x;
  for (int e = -1020; e <= 1020; e += 7)
    for (double m : {1.0, 1.2345, 1.5, 1.99999}) x.push_back(std::ldexp(m, e));
  x.push_back(1.0);
  x.push_back(std::nextafter(1.0, 2.0));
  x.push_back(std::nextafter(1.0, 0.0));
  std::vector<double> a(x.size()), s(x.size());
  sk::avx2::log_array(x, a);
  sk::scalar::log_array(x, s);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CAPTURE(x[i]);
    CHECK(std::abs(a[i] - s[i]) <= 4e-16 * std::max(1.0, std::abs(s[i])));
  }
}

TEST_CASE("avx2 sincos through the Box-Muller kernel at quadrant boundaries") {
  if (!have_avx2()) return;
  std::vector<double> u1, u2;
  for (int k = 0; k <= 4096; ++k) {
    const double u = (k + 0.5) / 4097.0;
    u1.push_back(0.3);
    u2.push_back(u);
  }
  for (double q : {0.25, 0.5, 0.75}) {
    u1.push_back(0.3);
    u2.push_back(q);
    u1.push_back(0.3);
    u2.push_back(std::nextafter(q, 0.0));
  }
  std::vector<double> a(2 * u1.size()), s(2 * u1.size());
  sk::avx2::box_muller(u1, u2, a);
  sk::scalar::box_muller(u1, u2, s);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - s[i]));
  CHECK(worst < 1e-14);
}

TEST_CASE("argmax returns the first maximum in both variants") {
  std::vector<double> v(37, 1.0);
  CHECK(sk::scalar::argmax(v) == 0);
  v[20] = 2.0;
  v[33] = 2.0;
  CHECK(sk::scalar::argmax(v) == 20);
  CHECK(sk::argmax(v) == 20);
  if (have_avx2()) {
    CHECK(sk::avx2::argmax(v) == 20);
    v[3] = 2.0;
    CHECK(sk::avx2::argmax(v) == 3);
    std::vector<double> neg(9, -5.0);
    neg[8] = -1.0;
    CHECK(sk::avx2::argmax(neg) == 8);
  }
  CHECK(sk::argmax(std::vector<double>{}) == 0);
}
