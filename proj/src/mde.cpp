// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/mde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace rmtlab {

namespace {

// P(m) = m^3 + 2w m^2 + (w^2 + 1 - a) m + w, a = |z|^2.
inline cplx cubic(cplx m, cplx w, double a) {
  return ((m + 2.0 * w) * m + (w * w + 1.0 - a)) * m + w;
}

inline cplx cubic_prime(cplx m, cplx w, double a) {
  return (3.0 * m + 4.0 * w) * m + w * w + 1.0 - a;
}

std::optional<cplx> newton(cplx m, cplx w, double a, int max_iter = 40) {
  for (int k = 0; k < max_iter; ++k) {
    const cplx d = cubic_prime(m, w, a);
    if (d == 0.0) return std::nullopt;
    const cplx step = cubic(m, w, a) / d;
    m -= step;
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) return std::nullopt;
    if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(m))) return m;
  }
  return std::nullopt;
}

// Damped iteration m <- -1/(w + m - a/(w+m)); contractive for Im w >~ 1.
cplx fixed_point(cplx w, double a) {
  cplx m = -1.0 / w;
  for (int k = 0; k < 500; ++k) {
    const cplx next = -1.0 / (w + m - a / (w + m));
    const cplx mixed = 0.5 * (m + next);
    if (std::abs(mixed - m) < 1e-15 * std::abs(m)) return mixed;
    m = mixed;
  }
  return m;
}

MdeSolution finish(cplx z, cplx w, cplx m) {
  return MdeSolution{z, w, m, m / (w + m), mde_residual(z, w, m)};
}

// Upper half plane only.
std::optional<cplx> homotopy(cplx w, double a) {
  const double x = w.real();
  const double eta = w.imag();
  const double eta_hi = std::max(eta, 2.0 + std::abs(x));
  cplx m = fixed_point(cplx(x, eta_hi), a);
  double eta_c = eta_hi;
  int refinements = 0;
  double ratio = 0.25;
  while (eta_c > eta) {
    const double eta_next = std::max(eta, eta_c * ratio);
    auto r = newton(m, cplx(x, eta_next), a);
    const bool ok = r && r->imag() > 0.0 && std::abs(*r - m) < 0.5 + 2.0 * std::abs(m);
    if (!ok) {
      if (++refinements > 60) return std::nullopt;
      ratio = std::sqrt(ratio);
      continue;
    }
    m = *r;
    eta_c = eta_next;
    ratio = std::max(0.25, ratio * ratio);
  }
  if (auto r = newton(m, w, a, 5)) m = *r;
  return m;
}

}  // namespace

double mde_residual(cplx z, cplx w, cplx m) {
  const double a = std::norm(z);
  return std::abs(-1.0 / m - w - m + a / (w + m));
}

std::array<cplx, 3> mde_cubic_roots(cplx z, cplx w) {
  const double a = std::norm(z);
  // Durand-Kerner with the usual non-symmetric seeds, then Newton polish.
  const double radius = 1.0 + std::max({2.0 * std::abs(w), std::abs(w * w + 1.0 - a), std::abs(w)});
  std::array<cplx, 3> r;
  const cplx seed(0.4, 0.9);
  r[0] = radius * seed;
  r[1] = r[0] * seed;
  r[2] = r[1] * seed;
  for (int it = 0; it < 1000; ++it) {
    double change = 0.0;
    for (int i = 0; i < 3; ++i) {
      cplx denom = 1.0;
      for (int j = 0; j < 3; ++j)
        if (j != i) denom *= r[i] - r[j];
      if (denom == 0.0) denom = 1e-300;
      const cplx step = cubic(r[i], w, a) / denom;
      r[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  for (auto& root : r)
    if (auto p = newton(root, w, a, 8)) root = *p;
  return r;
}

MdeSolution solve_mde_by_roots(cplx z, cplx w) {
  if (w.imag() == 0.0) throw InvalidArgument("w", "Im w must be nonzero");
  const double sign = w.imag() > 0 ? 1.0 : -1.0;
  const auto roots = mde_cubic_roots(z, w);
  cplx best = roots[0];
  for (const auto& r : roots)
    if (sign * r.imag() > sign * best.imag()) best = r;
  return finish(z, w, best);
}

MdeSolution solve_mde(cplx z, cplx w, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("tol", "must be positive");
  if (w.imag() == 0.0 || !std::isfinite(w.imag()) || !std::isfinite(w.real()))
    throw InvalidArgument("w", "Im w must be finite and nonzero");
  const bool lower = w.imag() < 0.0;
  const cplx wu = lower ? std::conj(w) : w;
  const double a = std::norm(z);

  double best_residual = std::numeric_limits<double>::infinity();
  if (auto m = homotopy(wu, a); m && m->imag() > 0.0) {
    MdeSolution s = finish(z, wu, *m);
    if (s.residual <= tol) {
      if (lower) s = finish(z, w, std::conj(s.m));
      return s;
    }
    best_residual = s.residual;
  }
  MdeSolution s = solve_mde_by_roots(z, wu);
  if (s.m.imag() > 0.0 && s.residual <= tol) {
    if (lower) s = finish(z, w, std::conj(s.m));
    return s;
  }
  best_residual = std::min(best_residual, s.residual);
  throw SolverFailure("self-consistent equation did not converge", best_residual);
}

cplx mde_dm_dw(const MdeSolution& s) {
  const double a = std::norm(s.z);
  const cplx m = s.m;
  const cplx w = s.w;
  return -(2.0 * m * m + 2.0 * w * m + 1.0) / cubic_prime(m, w, a);
}

DeterministicM deterministic_m(const MdeSolution& s) {
  return DeterministicM{s.z, s.w, {s.m, -s.z * s.u, -std::conj(s.z) * s.u, s.m}};
}

double big_mde_residual(const DeterministicM& M) {
  const auto& e = M.e;
  const cplx det = e[0] * e[3] - e[1] * e[2];
  // -M^{-1}
  const std::array<cplx, 4> lhs{-e[3] / det, e[1] / det, e[2] / det, -e[0] / det};
  const cplx avg = M.trace_normalized();
  const std::array<cplx, 4> rhs{M.w + avg, M.z, std::conj(M.z), M.w + avg};
  double r = 0.0;
  for (int k = 0; k < 4; ++k) r = std::max(r, std::abs(lhs[k] - rhs[k]));
  return r;
}

double TimeScaledProfile::c_star() const {
  const double s = 1.0 + (t - T);
  if (!(s > 0.0)) throw InvalidArgument("t", "1 + t - T must be positive");
  return std::sqrt(s);
}

MdeSolution solve_mde_scaled(cplx z, cplx w, double c, double tol) {
  if (!(c > 0.0)) throw InvalidArgument("c", "must be positive");
  if (c == 1.0) return solve_mde(z, w, tol);
  const MdeSolution base = solve_mde(z / c, w / c, tol);
  const cplx m = base.m / c;
  return MdeSolution{z, w, m, m / (w + c * c * m), base.residual};
}

cplx TimeScaledProfile::m(cplx w, double tol) const {
  return solve_mde_scaled(z, w, c_star(), tol).m;
}

cplx TimeScaledProfile::u(cplx w, double tol) const {
  return solve_mde_scaled(z, w, c_star(), tol).u;
}

}  // namespace rmtlab
