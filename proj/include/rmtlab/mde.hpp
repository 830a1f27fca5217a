// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scalar self-consistent equation of the Hermitized i.i.d. model
//
//   -1/m = w + m - |z|^2 / (w + m),   Im w * Im m > 0,
//
// and the objects built from its solution.

#include <array>

#include "rmtlab/common.hpp"

namespace rmtlab {

struct MdeSolution {
  cplx z;
  cplx w;
  cplx m;
  cplx u;           // m / (w + m)
  double residual;  // |-1/m - w - m + |z|^2/(w+m)|
};

inline constexpr double kDefaultMdeTol = 1e-11;

/// Throws SolverFailure if no branch-correct root with residual <= tol is found.
MdeSolution solve_mde(cplx z, cplx w, double tol = kDefaultMdeTol);

/// Branch-correct root picked from all three roots of the cubic, no
/// continuation. Independent second route used to cross-check solve_mde.
MdeSolution solve_mde_by_roots(cplx z, cplx w);

/// All three roots of m^3 + 2w m^2 + (w^2 + 1 - |z|^2) m + w.
std::array<cplx, 3> mde_cubic_roots(cplx z, cplx w);

double mde_residual(cplx z, cplx w, cplx m);

/// dm/dw by implicit differentiation of the cubic.
cplx mde_dm_dw(const MdeSolution& s);

/// 2x2 block data of M^z(w) = [[m, -z u], [-conj(z) u, m]].
struct DeterministicM {
  cplx z;
  cplx w;
  std::array<cplx, 4> e;  // row major: e[0]=M11, e[1]=M12, e[2]=M21, e[3]=M22

  cplx trace_normalized() const { return 0.5 * (e[0] + e[3]); }
};

DeterministicM deterministic_m(const MdeSolution& s);

/// Max-entry residual of -1/M = w + Z + <M>, Z = [[0, z], [conj z, 0]].
double big_mde_residual(const DeterministicM& M);

/// Time-scaled solution m_t^z(w) = m^{z/c}(w/c) / c with c = sqrt(1 + t - T).
struct TimeScaledProfile {
  double T = 0.0;
  double t = 0.0;
  cplx z;

  double c_star() const;
  cplx m(cplx w, double tol = kDefaultMdeTol) const;
  /// u_t = m_t / (w + c^2 m_t); reduces to m/(w+m) at c = 1.
  cplx u(cplx w, double tol = kDefaultMdeTol) const;
};

/// m_t and u_t for a given c directly (c = c_star).
MdeSolution solve_mde_scaled(cplx z, cplx w, double c, double tol = kDefaultMdeTol);

}  // namespace rmtlab
