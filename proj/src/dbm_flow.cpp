// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/dbm_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/numeric/odeint.hpp>

#include "rmtlab/density.hpp"
#include "rmtlab/field.hpp"
#include "rmtlab/mde.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/two_resolvent.hpp"

namespace rmtlab {

std::string_view to_string(FlowVariant v) {
  return v == FlowVariant::additive ? "additive" : "ornstein-uhlenbeck";
}

FlowVariant parse_flow_variant(std::string_view s) {
  if (s == "additive") return FlowVariant::additive;
  if (s == "ornstein-uhlenbeck" || s == "ou") return FlowVariant::ornstein_uhlenbeck;
  throw InvalidArgument("variant", "expected additive|ornstein-uhlenbeck");
}

std::string_view to_string(WindowCase c) { return c == WindowCase::complex ? "complex" : "real"; }

MatrixSample evolve(const MatrixSample& x, double dt, FlowVariant variant, SymmetryClass driving,
                    std::uint64_t seed, std::uint64_t trial, std::uint32_t step) {
  if (!(dt > 0.0)) throw InvalidArgument("dt", "must be positive");
  const int n = x.n;
  const std::size_t count = static_cast<std::size_t>(n) * n;
  const bool real_noise = driving == SymmetryClass::real;
  const CounterRng rng(seed, trial, Stream::brownian, step);

  double keep = 1.0;
  double var = dt / n;
  if (variant == FlowVariant::ornstein_uhlenbeck) {
    keep = std::exp(-0.5 * dt);
    var = -std::expm1(-dt) / n;
  }
  const double sd = std::sqrt(var);

  MatrixSample out = x;
  for (std::size_t k = 0; k < count; ++k) {
    cplx b;
    if (real_noise) {
      const auto [g0, g1] = rng.normal_pair(k >> 1);
      b = (k & 1) ? g1 : g0;
    } else {
      b = rng.complex_normal(k);
    }
    out.a[k] = keep * x.a[k] + sd * b;
  }
  out.is_real = x.is_real && real_noise;
  return out;
}

// ---------------------------------------------------------------------------
// Characteristics

namespace {

using State = std::array<double, 4>;  // Re w, Im w, Re z, Im z

struct CharacteristicSystem {
  FlowVariant variant;
  double T;
  cplx z_end;

  cplx drift_w(double t, cplx w, cplx z) const {
    if (variant == FlowVariant::additive) {
      const double c = std::sqrt(1.0 + t - T);
      return -solve_mde_scaled(z_end, w, c).m;
    }
    return -solve_mde(z, w).m - 0.5 * w;
  }

  void operator()(const State& x, State& dxdt, double t) const {
    const cplx w(x[0], x[1]);
    const cplx z(x[2], x[3]);
    const cplx dw = drift_w(t, w, z);
    dxdt[0] = dw.real();
    dxdt[1] = dw.imag();
    if (variant == FlowVariant::ornstein_uhlenbeck) {
      dxdt[2] = -0.5 * x[2];
      dxdt[3] = -0.5 * x[3];
    } else {
      dxdt[2] = 0.0;
      dxdt[3] = 0.0;
    }
  }
};

}  // namespace

cplx Characteristic::w_at(double t) const {
  if (path.empty()) throw InvalidArgument("path", "empty characteristic");
  if (path.size() == 1 || t <= path.front().t) return path.front().w;
  if (t >= path.back().t) return path.back().w;
  auto hi = std::lower_bound(path.begin(), path.end(), t,
                             [](const CharacteristicPoint& p, double v) { return p.t < v; });
  if (hi->t == t) return hi->w;
  auto lo = hi - 1;
  const CharacteristicSystem sys{variant, T, z_end};
  const double h = hi->t - lo->t;
  const double s = (t - lo->t) / h;
  const cplx d0 = sys.drift_w(lo->t, lo->w, lo->z) * h;
  const cplx d1 = sys.drift_w(hi->t, hi->w, hi->z) * h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * lo->w + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * hi->w +
         (s3 - s2) * d1;
}

cplx Characteristic::z_at(double t) const {
  if (variant == FlowVariant::additive) return z_end;
  return z_end * std::exp(0.5 * (T - t));
}

Characteristic solve_characteristic(cplx z, double eta_end, double T, FlowVariant variant,
                                    const std::vector<double>& sample_times) {
  if (!(eta_end > 0.0)) throw InvalidArgument("eta_end", "must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("T", "must be nonnegative");
  if (variant == FlowVariant::additive && T >= 1.0)
    throw InvalidArgument("T", "additive characteristic needs T < 1");

  Characteristic ch;
  ch.z_end = z;
  ch.variant = variant;
  ch.T = T;
  const cplx w_end(0.0, eta_end);
  if (T == 0.0) {
    ch.path.push_back({0.0, w_end, z});
    return ch;
  }

  // Descending output grid: T, requested times, a uniform backbone, 0.
  std::vector<double> times{T, 0.0};
  constexpr int kBackbone = 32;
  for (int k = 1; k < kBackbone; ++k) times.push_back(T * k / kBackbone);
  for (double t : sample_times) {
    if (!(t >= 0.0 && t <= T)) throw InvalidArgument("sample_times", "must lie in [0, T]");
    times.push_back(t);
  }
  std::sort(times.begin(), times.end(), std::greater<>());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  namespace odeint = boost::numeric::odeint;
  using Stepper = odeint::runge_kutta_dopri5<State>;
  const CharacteristicSystem sys{variant, T, z};
  State x{0.0, eta_end, z.real(), z.imag()};
  std::vector<CharacteristicPoint> rev;
  try {
    odeint::integrate_times(
        odeint::make_dense_output(1e-12, 1e-12, Stepper()), std::cref(sys), x, times.begin(),
        times.end(), -T / 64.0, [&](const State& s, double t) {
          if (!std::isfinite(s[0]) || !std::isfinite(s[1]))
            throw NumericalFailure("characteristic left the finite range");
          rev.push_back({t, cplx(s[0], s[1]), cplx(s[2], s[3])});
        });
  } catch (const NumericalFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalFailure(std::string("ODE failure: ") + e.what());
  }
  ch.path.assign(rev.rbegin(), rev.rend());
  ch.path.back().w = w_end;  // integrate_times reports the initial state exactly
  ch.path.front().t = 0.0;
  return ch;
}

// ---------------------------------------------------------------------------
// Windows

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw InvalidArgument(field, what);
}

// Nominal surrogate variance: log of the eta ratio, doubled in the first
// real regime where eta exceeds (Im z)^2 on the band.
void finish_windows(WindowDecomposition& w, const std::vector<double>& t, const std::vector<double>& eta,
                    int regime) {
  const double factor = (w.kind == WindowCase::real && regime == 1) ? 2.0 : 1.0;
  for (std::size_t j = 1; j < t.size(); ++j)
    w.windows.push_back({t[j - 1], t[j], eta[j - 1], eta[j], regime, factor * std::log(eta[j - 1] / eta[j])});
}

}  // namespace

WindowDecomposition window_times(const WindowExponents& ex, int K, int n, WindowCase kind) {
  require(K >= 1, "K", "must be >= 1");
  require(n >= 2, "n", "must be >= 2");
  require(ex.a >= 0.0, "a", "must be >= 0");
  require(ex.b > 0.0, "b", "must be > 0");
  require(ex.a + ex.b < 1.0, "a+b", "must be < 1");

  WindowDecomposition w;
  w.kind = kind;
  w.exponents = ex;
  w.K = K;
  w.n = n;
  const double ln = std::log(static_cast<double>(n));
  w.t_b = std::exp(-ex.b * ln);
  w.eta_terminal = std::exp((ex.a - 1.0) * ln);

  if (kind == WindowCase::complex) {
    const double delta = (1.0 - ex.a - ex.b) / K;
    std::vector<double> t(K + 1), eta(K + 1);
    for (int i = 0; i <= K; ++i) {
      eta[i] = std::exp((ex.a + (K - i) * delta - 1.0) * ln);
      t[i] = w.t_b - eta[i];
    }
    t[0] = 0.0;
    t[K] = w.t_b;
    w.times = t;
    finish_windows(w, t, eta, 1);
    for (auto& win : w.windows) win.surrogate_variance = delta * ln;
  } else {
    require(ex.alpha > 0.0 && ex.alpha < 0.5, "alpha", "must lie in (0, 1/2)");
    require(ex.c >= 0.0, "c", "must be >= 0");
    const double d1 = (2.0 * ex.alpha - ex.b - ex.c) / K;
    const double d2 = (1.0 - ex.a - ex.c - 2.0 * ex.alpha) / K;
    require(d1 > 0.0, "exponents", "need 2 alpha > b + c");
    require(d2 > 0.0, "exponents", "need a + c + 2 alpha < 1");
    std::vector<double> t1(K + 1), e1(K + 1), t2(K + 1), e2(K + 1);
    for (int i = 0; i <= K; ++i) {
      e1[i] = std::exp((-2.0 * ex.alpha + ex.c + (K - i) * d1) * ln);
      t1[i] = w.t_b - e1[i];
      e2[i] = std::exp((ex.a + (K - i) * d2 - 1.0) * ln);
      t2[i] = w.t_b - e2[i];
    }
    t1[0] = 0.0;
    t2[K] = w.t_b;
    finish_windows(w, t1, e1, 1);
    finish_windows(w, t2, e2, 2);
    w.times = t1;
    for (double t : t2)
      if (t > w.times.back()) w.times.push_back(t);
  }
  for (std::size_t i = 1; i < w.times.size(); ++i)
    require(w.times[i] > w.times[i - 1], "exponents", "boundary times are not strictly increasing");
  return w;
}

WindowDecomposition ratio_window(cplx z, double eta_end, double ratio, int n, WindowCase kind) {
  require(eta_end > 0.0, "eta_end", "must be positive");
  require(ratio > 1.0, "ratio", "must exceed 1");
  require(n >= 2, "n", "must be >= 2");
  // Along the additive characteristic w_t = w_T + (T - t) m(w_T), so
  // eta_0 = eta_end + T Im m(i eta_end).
  const double im_m = solve_mde(z, cplx(0.0, eta_end)).m.imag();
  const double T = (ratio - 1.0) * eta_end / im_m;
  require(T < 1.0, "ratio", "required flow time is >= 1");

  WindowDecomposition w;
  w.kind = kind;
  w.K = 1;
  w.n = n;
  w.t_b = T;
  w.eta_terminal = eta_end;
  w.times = {0.0, T};
  const double var = std::log(ratio) * (kind == WindowCase::real ? 2.0 : 1.0);
  w.windows.push_back({0.0, T, ratio * eta_end, eta_end, 1, var});
  return w;
}

double window_variance(const WindowDecomposition& w, std::size_t window, cplx z, double eta_start,
                       double eta_end) {
  if (window >= w.windows.size()) throw InvalidArgument("window", "out of range");
  if (w.kind == WindowCase::complex) return std::log(eta_start / eta_end);
  return variance_profile_real(z, eta_start, eta_end);
}

// ---------------------------------------------------------------------------
// Increments

IncrementRecord measure_increments(const EnsembleSpec& spec, const std::vector<cplx>& z_list,
                                   const WindowDecomposition& windows, std::size_t trials,
                                   std::uint64_t seed, int workers) {
  spec.validate();
  require(windows.n == spec.n, "n", "window decomposition built for a different n");
  require(!windows.times.empty(), "windows", "no boundary times");
  const int n = spec.n;
  const double T = windows.t_b;
  const std::size_t nb = windows.times.size();
  const std::size_t nz = z_list.size();
  const double floor = std::pow(std::log(static_cast<double>(n)), 2);

  // Deterministic part: eta along each characteristic and n I_t(eta) at each boundary.
  std::vector<double> eta(nb * nz), potential(nb * nz);
  for (std::size_t p = 0; p < nz; ++p) {
    const cplx z = z_list[p];
    require(std::abs(z) < 1.0, "z_list", "points must lie inside the unit disc");
    const Characteristic ch = solve_characteristic(z, windows.eta_terminal, T, FlowVariant::additive, windows.times);
    for (std::size_t b = 0; b < nb; ++b) {
      const double t = windows.times[b];
      const double e = ch.eta_at(t);
      if (!(n * e >= floor))
        throw InvalidArgument("windows", "n * eta < (log n)^2 at a window boundary");
      const double c = std::sqrt(1.0 + t - T);
      const DensityProfile prof = build_density(z / c, 64);
      eta[b * nz + p] = e;
      potential[b * nz + p] = log_potential_scaled(prof, e, c);
    }
  }

  auto boundary_index = [&](double t) {
    auto it = std::lower_bound(windows.times.begin(), windows.times.end(), t);
    return static_cast<std::size_t>(it - windows.times.begin());
  };

  const SymmetryClass driving = spec.cls;
  std::vector<std::vector<IncrementRow>> per_trial(trials);
  std::vector<char> failed(trials, 0);
  for_each_trial(trials, workers, [&](std::size_t trial) {
    try {
      std::vector<double> psi_vals(nb * nz);
      MatrixSample x = sample(spec, seed, trial);
      const double shrink = std::sqrt(1.0 - T);
      for (auto& v : x.a) v *= shrink;
      double t_now = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        const double dt = windows.times[b] - t_now;
        if (dt > 0.0) x = evolve(x, dt, FlowVariant::additive, driving, seed, trial, static_cast<std::uint32_t>(b));
        t_now = windows.times[b];
        for (std::size_t p = 0; p < nz; ++p) {
          const HermitizedSpectrum sp = singular_values(x, z_list[p]);
          const double v = psi_with_potential(sp, potential[b * nz + p], z_list[p], eta[b * nz + p], n, spec.cls);
          if (!std::isfinite(v)) throw NumericalFailure("non-finite field value");
          psi_vals[b * nz + p] = v;
        }
      }
      auto& rows = per_trial[trial];
      for (std::size_t j = 0; j < windows.windows.size(); ++j) {
        const std::size_t b0 = boundary_index(windows.windows[j].t_start);
        const std::size_t b1 = boundary_index(windows.windows[j].t_end);
        for (std::size_t p = 0; p < nz; ++p) {
          const double e0 = eta[b0 * nz + p];
          const double e1 = eta[b1 * nz + p];
          rows.push_back({trial, static_cast<int>(j), z_list[p],
                          psi_vals[b1 * nz + p] - psi_vals[b0 * nz + p],
                          window_variance(windows, j, z_list[p], e0, e1)});
        }
      }
    } catch (const Error&) {
      per_trial[trial].clear();
      failed[trial] = 1;
    }
  });

  IncrementRecord rec;
  rec.trials = trials;
  for (std::size_t k = 0; k < trials; ++k) {
    rec.failed_trials += failed[k];
    rec.rows.insert(rec.rows.end(), per_trial[k].begin(), per_trial[k].end());
  }
  return rec;
}

IncrementRecord gaussian_surrogate(const WindowDecomposition& windows, const std::vector<cplx>& z_list,
                                   std::size_t trials, std::uint64_t seed) {
  const std::size_t nz = z_list.size();
  const std::size_t nw = windows.windows.size();

  // Per window: union-find groups of points within squared distance eta.
  std::vector<std::vector<std::size_t>> root(nw, std::vector<std::size_t>(nz));
  std::vector<std::vector<double>> var(nw, std::vector<double>(nz));
  for (std::size_t j = 0; j < nw; ++j) {
    const Window& win = windows.windows[j];
    const double scale = std::sqrt(win.eta_start * win.eta_end);
    auto& parent = root[j];
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (std::size_t p = 0; p < nz; ++p)
      for (std::size_t q = p + 1; q < nz; ++q)
        if (std::norm(z_list[p] - z_list[q]) <= scale) {
          const std::size_t a = find(p), b = find(q);
          parent[std::max(a, b)] = std::min(a, b);
        }
    for (std::size_t p = 0; p < nz; ++p) {
      parent[p] = find(p);
      var[j][p] = windows.kind == WindowCase::complex
                      ? win.surrogate_variance
                      : variance_profile_real(z_list[p], win.eta_start, win.eta_end);
    }
  }

  IncrementRecord rec;
  rec.trials = trials;
  rec.rows.reserve(trials * nw * nz);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (std::size_t j = 0; j < nw; ++j) {
      const CounterRng rng(seed, trial, Stream::surrogate, static_cast<std::uint32_t>(j));
      for (std::size_t p = 0; p < nz; ++p) {
        const std::size_t g = root[j][p];
        const auto [g0, g1] = rng.normal_pair(g >> 1);
        const double gauss = (g & 1) ? g1 : g0;
        const double v = var[j][p];
        rec.rows.push_back({trial, static_cast<int>(j), z_list[p], std::sqrt(v) * gauss, v});
      }
    }
  }
  return rec;
}

}  // namespace rmtlab
