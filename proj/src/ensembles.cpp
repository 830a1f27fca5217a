// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/ensembles.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <numbers>

#include "rmtlab/linalg.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/simd/kernels.hpp"

namespace rmtlab {

std::string_view to_string(BaseLaw law) {
  switch (law) {
    case BaseLaw::gaussian: return "gaussian";
    case BaseLaw::rademacher: return "rademacher";
    case BaseLaw::custom: return "custom";
  }
  return "?";
}

BaseLaw parse_base_law(std::string_view s) {
  if (s == "gaussian") return BaseLaw::gaussian;
  if (s == "rademacher") return BaseLaw::rademacher;
  if (s == "custom") return BaseLaw::custom;
  throw InvalidArgument("base_law", "expected gaussian|rademacher|custom, got '" + std::string(s) + "'");
}

void EnsembleSpec::validate() const {
  if (n < 1) throw InvalidArgument("n", "must be >= 1");
  if (!(gaussian_component >= 0.0 && gaussian_component <= 1.0))
    throw InvalidArgument("gaussian_component", "must lie in [0, 1]");
  if (!(ginibre_component >= 0.0 && ginibre_component <= 1.0))
    throw InvalidArgument("ginibre_component", "must lie in [0, 1]");
  if (gaussian_component + ginibre_component > 1.0)
    throw InvalidArgument("ginibre_component", "a + t must not exceed 1");
  if (law == BaseLaw::custom && !(custom_p > 0.0 && custom_p <= 1.0))
    throw InvalidArgument("custom_p", "must lie in (0, 1]");
}

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

double real_gaussian(const CounterRng& rng, std::uint64_t k) {
  const auto [a, b] = rng.normal_pair(k >> 1);
  return (k & 1) ? b : a;
}

double three_point(double u, double p) {
  if (u < 0.5 * p) return 1.0 / std::sqrt(p);
  if (u < p) return -1.0 / std::sqrt(p);
  return 0.0;
}

// Unit-variance base entry chi' of the requested class.
cplx base_entry(const EnsembleSpec& spec, const CounterRng& rng, std::uint64_t k) {
  const bool real = spec.cls == SymmetryClass::real;
  switch (spec.law) {
    case BaseLaw::gaussian:
      return real ? cplx(real_gaussian(rng, k)) : rng.complex_normal(k);
    case BaseLaw::rademacher: {
      const auto [u1, u2] = rng.uniform_pair(k);
      const double r1 = u1 < 0.5 ? 1.0 : -1.0;
      if (real) return r1;
      return kInvSqrt2 * cplx(r1, u2 < 0.5 ? 1.0 : -1.0);
    }
    case BaseLaw::custom: {
      const auto [u1, u2] = rng.uniform_pair(k);
      if (real) return three_point(u1, spec.custom_p);
      return kInvSqrt2 * cplx(three_point(u1, spec.custom_p), three_point(u2, spec.custom_p));
    }
  }
  return 0.0;
}

}  // namespace

MatrixSample sample(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t trial) {
  spec.validate();
  const int n = spec.n;
  const std::size_t count = static_cast<std::size_t>(n) * n;
  const bool real = spec.cls == SymmetryClass::real;
  const double a = spec.gaussian_component;
  const double t = spec.ginibre_component;

  MatrixSample x;
  x.spec = spec;
  x.n = n;
  x.seed = seed;
  x.trial = trial;
  x.is_real = real && t == 0.0;
  x.a.resize(count);

  const CounterRng base(seed, trial, Stream::entries);
  const CounterRng gauss(seed, trial, Stream::gaussian_component);
  const CounterRng ginibre(seed, trial, Stream::ginibre_component);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double wa = std::sqrt(1.0 - a), wg = std::sqrt(a);
  const double wy = std::sqrt(1.0 - t), wt = std::sqrt(t);

  for (std::size_t k = 0; k < count; ++k) {
    cplx chi = base_entry(spec, base, k);
    if (a > 0.0) {
      const cplx g = real ? cplx(real_gaussian(gauss, k)) : gauss.complex_normal(k);
      chi = wa * chi + wg * g;
    }
    if (t > 0.0) chi = wy * chi + wt * ginibre.complex_normal(k);
    x.a[k] = scale * chi;
  }
  return x;
}

MatrixSample matrix_from_entries(int n, std::vector<cplx> entries) {
  if (n < 0 || entries.size() != static_cast<std::size_t>(n) * n)
    throw InvalidArgument("entries", "size must be n*n");
  MatrixSample x;
  x.n = n;
  x.spec.n = n;
  x.is_real = std::all_of(entries.begin(), entries.end(), [](cplx v) { return v.imag() == 0.0; });
  x.spec.cls = x.is_real ? SymmetryClass::real : SymmetryClass::complex;
  x.a = std::move(entries);
  return x;
}

HermitianMatrix hermitize(const MatrixSample& x, cplx z) {
  const int n = x.n;
  HermitianMatrix h;
  h.dim = 2 * n;
  h.a.assign(static_cast<std::size_t>(h.dim) * h.dim, 0.0);
  auto at = [&](int i, int j) -> cplx& { return h.a[static_cast<std::size_t>(j) * h.dim + i]; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx v = x(i, j) - (i == j ? z : cplx(0.0));
      at(i, n + j) = v;
      at(n + j, i) = std::conj(v);
    }
  return h;
}

HermitizedSpectrum singular_values(const MatrixSample& x, cplx z) {
  auto s = linalg::singular_values_desc(x, z);
  std::reverse(s.begin(), s.end());
  return {z, std::move(s)};
}

cplx resolvent_trace(const HermitizedSpectrum& spectrum, cplx w) {
  if (w.imag() == 0.0) throw InvalidArgument("w", "Im w must be nonzero");
  const auto n = spectrum.lambda.size();
  if (n == 0) return 0.0;
  return simd::sum_chiral_resolvent(spectrum.lambda, w) / (2.0 * static_cast<double>(n));
}

std::vector<TailRow> tail_table(const std::vector<double>& n_lambda1, const std::vector<double>& s_grid) {
  using boost::math::binomial_distribution;
  std::vector<TailRow> rows;
  const std::size_t trials = n_lambda1.size();
  for (double s : s_grid) {
    // s = 0 is allowed as a sanity row; otherwise the bound is only meaningful on [0.01, 1]
    if (!(s == 0.0 || (s >= 0.01 && s <= 1.0))) throw InvalidArgument("s_grid", "values must be 0 or lie in [0.01, 1]");
    TailRow r{s, 0, trials, 0.0, 0.0, 1.0};
    for (double v : n_lambda1)
      if (v <= s) ++r.hits;
    if (trials > 0) {
      const double k = static_cast<double>(r.hits);
      const double nt = static_cast<double>(trials);
      r.frequency = k / nt;
      r.ci_low = binomial_distribution<>::find_lower_bound_on_p(nt, k, 0.025);
      r.ci_high = binomial_distribution<>::find_upper_bound_on_p(nt, k, 0.025);
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> smallest_sv_samples(const EnsembleSpec& spec, cplx z, std::size_t trials,
                                        std::uint64_t seed, int workers) {
  spec.validate();
  std::vector<double> scaled(trials);
  for_each_trial(trials, workers, [&](std::size_t k) {
    const MatrixSample x = sample(spec, seed, k);
    const auto sv = linalg::singular_values_desc(x, z);
    scaled[k] = sv.back() * spec.n;
  });
  return scaled;
}

std::vector<TailRow> smallest_sv_tail(const EnsembleSpec& spec, cplx z, const std::vector<double>& s_grid,
                                      std::size_t trials, std::uint64_t seed, int workers) {
  for (double s : s_grid)
    if (!(s >= 0.0)) throw InvalidArgument("s_grid", "values must be >= 0");
  return tail_table(smallest_sv_samples(spec, z, trials, seed, workers), s_grid);
}

double rigidity_statistic(const HermitizedSpectrum& spectrum, const std::vector<double>& gamma, int i_max) {
  const int n = static_cast<int>(spectrum.lambda.size());
  if (static_cast<int>(gamma.size()) != n) throw InvalidArgument("gamma", "size must equal n");
  if (i_max < 1 || i_max > n) throw InvalidArgument("i_max", "must lie in [1, n]");
  double worst = 0.0;
  for (int i = 0; i < i_max; ++i) worst = std::max(worst, std::abs(spectrum.lambda[i] - gamma[i]));
  return n * worst / std::log(static_cast<double>(n));
}

}  // namespace rmtlab
