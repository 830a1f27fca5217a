// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/density.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "rmtlab/mde.hpp"

namespace rmtlab {

namespace {

constexpr double kEta0 = 1e-8;
constexpr int kSegments = 48;

// Im m below this counts as outside the support.
constexpr double kEdgeThreshold = 1e-6;

double extrapolated_im_m(cplx z, double x) {
  const double a = solve_mde(z, cplx(x, kEta0)).m.imag();
  const double b = solve_mde(z, cplx(x, 2.0 * kEta0)).m.imag();
  return 2.0 * a - b;
}

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Integrand in s = sqrt(edge - x): 2 s rho(edge - s^2). Smooth at the edge.
struct EdgeIntegrand {
  cplx z;
  double edge;
  double operator()(double s) const { return 2.0 * s * density_at(z, edge - s * s); }
};

// int_s^{s_hi} g for s inside segment k (s_nodes[k] <= s <= s_nodes[k+1]).
double mass_above_s(const DensityProfile& p, double s) {
  const auto& sn = p.s_nodes;
  if (s <= 0.0) return 0.0;
  if (s >= sn.back()) return p.mass_above.back();
  const auto it = std::upper_bound(sn.begin(), sn.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - sn.begin()) - 1;
  EdgeIntegrand g{p.z, p.edge};
  return p.mass_above[k] + adaptive_simpson(g, sn[k], s, 1e-14);
}

// s with mass_above_s(s) = target, target in [0, 1/2].
double invert_mass(const DensityProfile& p, double target) {
  const auto& sn = p.s_nodes;
  const auto& ma = p.mass_above;
  if (target <= 0.0) return 0.0;
  if (target >= ma.back()) return sn.back();
  const auto it = std::upper_bound(ma.begin(), ma.end(), target);
  const std::size_t k = static_cast<std::size_t>(it - ma.begin()) - 1;
  EdgeIntegrand g{p.z, p.edge};
  double lo = sn[k];
  double hi = sn[k + 1];
  double s = lo + (hi - lo) * (target - ma[k]) / (ma[k + 1] - ma[k]);
  const double mass_tol = std::min(p.tol, 1e-10) * 1e-2;
  for (int it = 0; it < 100; ++it) {
    const double f = ma[k] + adaptive_simpson(g, sn[k], s, 1e-14) - target;
    if (std::abs(f) <= mass_tol) break;
    (f < 0.0 ? lo : hi) = s;
    if (hi - lo <= 1e-15 * sn.back()) break;
    const double d = g(s);
    double next = d > 0.0 ? s - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  return s;
}

}  // namespace

double density_at(cplx z, double x) {
  return std::max(0.0, extrapolated_im_m(z, x)) / std::numbers::pi;
}

double find_edge(cplx z, double tol) {
  if (extrapolated_im_m(z, 0.0) <= kEdgeThreshold)
    throw ProfileFailure("density vanishes at the origin; no bulk to bracket");
  double lo = 0.0;
  double hi = 1.0;
  while (extrapolated_im_m(z, hi) > kEdgeThreshold) {
    lo = hi;
    hi *= 2.0;
    if (hi > 64.0) throw ProfileFailure("edge bracket failure");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (extrapolated_im_m(z, mid) > kEdgeThreshold ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DensityProfile build_density(cplx z, int grid_size, double tol) {
  if (std::abs(z) > 0.99) throw InvalidArgument("z", "density requires |z| <= 0.99");
  if (grid_size < 64) throw InvalidArgument("grid_size", "must be >= 64");
  if (!(tol > 0.0)) throw InvalidArgument("tol", "must be positive");

  DensityProfile p;
  p.z = z;
  p.tol = tol;
  p.edge = find_edge(z, tol);

  p.grid.resize(static_cast<std::size_t>(grid_size));
  p.rho.resize(p.grid.size());
  for (int k = 0; k < grid_size; ++k) {
    // mirror the upper half so the grid is exactly symmetric
    const int j = std::min(k, grid_size - 1 - k);
    const double x = -p.edge + 2.0 * p.edge * j / (grid_size - 1);
    p.grid[k] = (j == k) ? x : -x;
    if (2 * k == grid_size - 1) p.grid[k] = 0.0;
    p.rho[k] = (k == 0 || k == grid_size - 1) ? 0.0 : density_at(z, p.grid[k]);
  }

  const double s_max = std::sqrt(p.edge);
  p.s_nodes.resize(kSegments + 1);
  p.mass_above.assign(kSegments + 1, 0.0);
  EdgeIntegrand g{z, p.edge};
  for (int k = 0; k <= kSegments; ++k) p.s_nodes[k] = s_max * k / kSegments;
  p.s_nodes.back() = s_max;
  for (int k = 0; k < kSegments; ++k)
    p.mass_above[k + 1] =
        p.mass_above[k] + adaptive_simpson(g, p.s_nodes[k], p.s_nodes[k + 1], 1e-14);
  return p;
}

double DensityProfile::cumulative(double x) const {
  if (x < 0.0) return -cumulative(-x);
  if (x >= edge) return 0.5;
  const double total = mass_above.back();
  return total - mass_above_s(*this, std::sqrt(edge - x));
}

double DensityProfile::trapezoid_mass() const {
  double acc = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    acc += 0.5 * (rho[k] + rho[k - 1]) * (grid[k] - grid[k - 1]);
  return acc;
}

double quantile(const DensityProfile& profile, int i, int n) {
  if (n < 1 || i == 0 || i > n || i < -n) throw InvalidArgument("i", "quantile index out of range");
  if (i < 0) return -quantile(profile, -i, n);
  if (i == n) return profile.edge;
  const double target = profile.mass_above.back() - 0.5 * i / n;
  const double s = invert_mass(profile, target);
  return profile.edge - s * s;
}

std::vector<double> quantiles(const DensityProfile& profile, int n) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 1; i <= n; ++i) out[i - 1] = quantile(profile, i, n);
  return out;
}

double phi(cplx z) {
  const double r = std::abs(z);
  return std::max(std::log(r), 0.0) - 0.5 * std::max(1.0 - r * r, 0.0);
}

double expected_centering(cplx z, int n, SymmetryClass cls) {
  if (n < 1) throw InvalidArgument("n", "must be >= 1");
  double e = n * phi(z);
  if (cls == SymmetryClass::real) {
    const double gap = 2.0 * z.imag();
    e += 0.25 * std::log(gap * gap + 1.0 / n);
  }
  return e;
}

double log_potential(const DensityProfile& p, double eta) {
  using boost::math::quadrature::gauss_kronrod;
  if (eta < 0.0) throw InvalidArgument("eta", "must be >= 0");
  const double eta2 = eta * eta;
  const double e = p.edge;
  const double split = 0.5 * e;
  const cplx z = p.z;

  // Inner part [0, split] with geometric breakpoints resolving the log peak at 0.
  auto inner = [&](double x) { return std::log(x * x + eta2) * density_at(z, x); };
  double acc = 0.0;
  double a = 0.0;
  double b = std::max(eta, 1e-12);
  while (a < split) {
    b = std::min(b, split);
    acc += gauss_kronrod<double, 31>::integrate(inner, a, b, 10, 1e-11);
    a = b;
    b *= 8.0;
  }
  // Outer part [split, edge] in s = sqrt(edge - x).
  auto outer = [&](double s) {
    const double x = e - s * s;
    return std::log(x * x + eta2) * 2.0 * s * density_at(z, x);
  };
  acc += gauss_kronrod<double, 31>::integrate(outer, 0.0, std::sqrt(e - split), 10, 1e-11);
  return 2.0 * acc;
}

double log_potential_scaled(const DensityProfile& scaled_profile, double eta, double c) {
  if (!(c > 0.0)) throw InvalidArgument("c", "must be positive");
  return 2.0 * std::log(c) + log_potential(scaled_profile, eta / c);
}

}  // namespace rmtlab
