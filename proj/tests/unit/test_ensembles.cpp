#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rmtlab/density.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/linalg.hpp"
#include "rmtlab/mde.hpp"

using namespace rmtlab;

namespace {

EnsembleSpec spec_of(SymmetryClass cls, BaseLaw law, int n, double a = 0.0, double t = 0.0) {
  EnsembleSpec s;
  s.cls = cls;
  s.law = law;
  s.n = n;
  s.gaussian_component = a;
  s.ginibre_component = t;
  return s;
}

struct Moments {
  cplx mean = 0.0;
  double abs2 = 0.0;
  cplx sq = 0.0;
  double abs4 = 0.0;
};

Moments entry_moments(const MatrixSample& x) {
  Moments m;
  const double s = std::sqrt(double(x.n));
  for (cplx v : x.a) {
    const cplx c = v * s;
    m.mean += c;
    m.abs2 += std::norm(c);
    m.sq += c * c;
    m.abs4 += std::norm(c) * std::norm(c);
  }
  const double N = double(x.a.size());
  m.mean /= N;
  m.abs2 /= N;
  m.sq /= N;
  m.abs4 /= N;
  return m;
}

}  // namespace

TEST_CASE("entry laws: mean, second moments, complex pseudo-variance") {
  for (auto law : {BaseLaw::gaussian, BaseLaw::rademacher, BaseLaw::custom})
    for (auto cls : {SymmetryClass::real, SymmetryClass::complex}) {
      const auto x = sample(spec_of(cls, law, 1000), 21, 0);
      CAPTURE(to_string(law));
      CAPTURE(to_string(cls));
      const Moments m = entry_moments(x);
      CHECK(std::abs(m.mean) <= 4e-3);
      CHECK(m.abs2 == doctest::Approx(1.0).epsilon(0.01));
      if (cls == SymmetryClass::complex) CHECK(std::abs(m.sq) <= 4e-3);
      else CHECK(x.is_real);
    }
}

TEST_CASE("mixtures preserve the entry variance") {
  for (double a : {0.0, 0.3, 1.0})
    for (double t : {0.0, 0.5}) {
      if (a + t > 1.0) continue;
      const auto x = sample(spec_of(SymmetryClass::real, BaseLaw::rademacher, 800, a, t), 2, 1);
      CHECK(entry_moments(x).abs2 == doctest::Approx(1.0).epsilon(0.01));
      CHECK(x.is_real == (t == 0.0));
    }
  CHECK_THROWS_AS(spec_of(SymmetryClass::real, BaseLaw::gaussian, 10, 0.7, 0.4).validate(), InvalidArgument);
  CHECK_THROWS_AS(spec_of(SymmetryClass::real, BaseLaw::gaussian, 0).validate(), InvalidArgument);
}

TEST_CASE("custom law fourth moment") {
  auto s = spec_of(SymmetryClass::real, BaseLaw::custom, 1000);
  s.custom_p = 0.25;
  const Moments m = entry_moments(sample(s, 4, 0));
  CHECK(m.abs4 == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("sampling is reproducible per (seed, trial)") {
  const auto s = spec_of(SymmetryClass::complex, BaseLaw::gaussian, 17);
  const auto a = sample(s, 9, 3);
  const auto b = sample(s, 9, 3);
  CHECK(a.a == b.a);
  CHECK(a.a != sample(s, 9, 4).a);
  CHECK(a.a != sample(s, 10, 3).a);
}

TEST_CASE("hermitization") {
  const auto one = matrix_from_entries(1, {cplx(0.7, -0.2)});
  const auto h1 = linalg::hermitian_eigenvalues(hermitize(one, cplx(0.1, 0.3)));
  const double d = std::abs(cplx(0.6, -0.5));
  CHECK(h1[0] == doctest::Approx(-d));
  CHECK(h1[1] == doctest::Approx(d));

  const auto x = sample(spec_of(SymmetryClass::complex, BaseLaw::gaussian, 32), 1, 0);
  const auto h = hermitize(x, cplx(0.2, -0.1));
  cplx tr = 0.0;
  for (int i = 0; i < h.dim; ++i) tr += h(i, i);
  CHECK(std::abs(tr) == 0.0);
  for (int i = 0; i < h.dim; ++i)
    for (int j = 0; j < h.dim; ++j) REQUIRE(h(i, j) == std::conj(h(j, i)));
  const auto ev = linalg::hermitian_eigenvalues(h);
  for (int i = 0; i < 32; ++i) CHECK(std::abs(ev[i] + ev[63 - i]) <= 1e-10);
}

TEST_CASE("singular values") {
  const auto zero = matrix_from_entries(5, std::vector<cplx>(25, 0.0));
  for (double l : singular_values(zero, 0.5).lambda) CHECK(l == doctest::Approx(0.5));

  std::vector<cplx> diag(16, 0.0);
  const double d[] = {-0.3, 2.0, 0.1, -1.5};
  for (int i = 0; i < 4; ++i) diag[i * 5] = d[i];
  const auto s = singular_values(matrix_from_entries(4, diag), 0.0).lambda;
  const double want[] = {0.1, 0.3, 1.5, 2.0};
  for (int i = 0; i < 4; ++i) CHECK(s[i] == doctest::Approx(want[i]));

  for (auto cls : {SymmetryClass::real, SymmetryClass::complex}) {
    const auto x = sample(spec_of(cls, BaseLaw::gaussian, 16), 5, 2);
    for (cplx z : {cplx(0.3), cplx(0.3, 0.4)}) {
      const auto sv = singular_values(x, z).lambda;
      REQUIRE(std::is_sorted(sv.begin(), sv.end()));
      const auto ev = linalg::hermitian_eigenvalues(hermitize(x, z));
      for (int i = 0; i < 16; ++i) {
        CHECK(std::abs(ev[16 + i] - sv[i]) <= 1e-9);
        CHECK(std::abs(ev[15 - i] + sv[i]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("resolvent trace") {
  HermitizedSpectrum zeros{0.0, std::vector<double>(10, 0.0)};
  const cplx g = resolvent_trace(zeros, cplx(0, 0.25));
  CHECK(std::abs(g - cplx(0, 4.0)) < 1e-12);

  const auto x = sample(spec_of(SymmetryClass::complex, BaseLaw::gaussian, 50), 3, 0);
  const auto sp = singular_values(x, 0.3);
  const cplx w(60.0, 80.0);
  CHECK(std::abs(resolvent_trace(sp, w) + 1.0 / w) < 1e-3);
}

TEST_CASE("local law at n = 512") {
  const int n = 512;
  const double eta = 0.05;
  const cplx z(0.5);
  const cplx m = solve_mde(z, cplx(0, eta)).m;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto sp = singular_values(sample(spec_of(SymmetryClass::complex, BaseLaw::gaussian, n), 77, t), z);
    worst = std::max(worst, std::abs(resolvent_trace(sp, cplx(0, eta)) - m));
  }
  MESSAGE("max |<G> - m| n eta = " << worst * n * eta);
  CHECK(worst <= 10.0 / (n * eta));
}

TEST_CASE("smallest singular value tail table") {
  const auto s = spec_of(SymmetryClass::complex, BaseLaw::gaussian, 24);
  const auto rows = smallest_sv_tail(s, 0.2, {0.0, 0.05, 0.2, 0.5, 1.0}, 300, 8, 2);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].hits == 0);
  CHECK(rows[0].frequency == 0.0);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].frequency >= rows[k - 1].frequency);
    CHECK(rows[k].ci_low <= rows[k].frequency);
    CHECK(rows[k].ci_high >= rows[k].frequency);
    CHECK(rows[k].trials == 300);
  }
  CHECK_THROWS_AS(tail_table({0.1}, {2.0}), InvalidArgument);
}

TEST_CASE("rigidity statistic vanishes on the quantiles") {
  const auto p = build_density(0.5, 256);
  const auto g = quantiles(p, 64);
  HermitizedSpectrum sp{0.5, g};
  CHECK(rigidity_statistic(sp, g, 32) == 0.0);
  sp.lambda[3] += 0.1;
  CHECK(rigidity_statistic(sp, g, 32) == doctest::Approx(64 * 0.1 / std::log(64.0)));
}

TEST_CASE("linear algebra routes agree") {
  for (auto cls : {SymmetryClass::real, SymmetryClass::complex}) {
    const auto x = sample(spec_of(cls, BaseLaw::gaussian, 20), 12, 0);
    for (cplx z : {cplx(0.4), cplx(-0.2, 0.3)}) {
      const auto sv = singular_values(x, z).lambda;
      double logdet = 0.0, gram = 0.0;
      for (double l : sv) {
        logdet += std::log(l);
        gram += std::log(l * l + 0.01);
      }
      CHECK(linalg::log_abs_det_shift(x, z) == doctest::Approx(logdet).epsilon(1e-10));
      CHECK(linalg::logdet_gram_shift(x, z, 0.1) == doctest::Approx(gram).epsilon(1e-10));
      std::vector<cplx> shifted = x.a;
      for (int i = 0; i < 20; ++i) shifted[i * 21] -= z;
      CHECK(oracle::log_abs_det(shifted, 20) == doctest::Approx(logdet).epsilon(1e-10));
    }
  }
}
