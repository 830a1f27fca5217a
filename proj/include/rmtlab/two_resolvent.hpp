// SPDX-License-Identifier: Apache-2.0
#pragma once

// Deterministic two-resolvent approximations and the covariance / variance
// formulas derived from them.
//
// A 2n x 2n matrix whose four n x n blocks are scalar multiples of the
// identity is stored by its 2x2 block data. The normalized trace <.> of the
// big matrix is half the 2x2 trace.

#include <array>

#include "rmtlab/common.hpp"
#include "rmtlab/mde.hpp"

namespace rmtlab {

struct Block2 {
  std::array<cplx, 4> e{};  // row major

  static Block2 zero() { return {}; }
  static Block2 identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
  static Block2 E1() { return {{1.0, 0.0, 0.0, 0.0}}; }
  static Block2 E2() { return {{0.0, 0.0, 0.0, 1.0}}; }

  cplx trace_normalized() const { return 0.5 * (e[0] + e[3]); }
  /// Largest singular value; equals the operator norm of the 2n x 2n matrix.
  double opnorm() const;
  /// <this * B>
  cplx pair_trace(const Block2& b) const;

  friend Block2 operator*(const Block2& a, const Block2& b);
  friend Block2 operator+(const Block2& a, const Block2& b);
  friend Block2 operator-(const Block2& a, const Block2& b);
  friend Block2 operator*(cplx s, const Block2& a);
};

Block2 to_block(const DeterministicM& M);

/// M_t^z(i eta) with m_t, u_t from the time-scaled solution; c = 1 gives M^z.
Block2 deterministic_block(cplx z, double eta, double c = 1.0);

/// S[B] = 2<B E1> E2 + 2<B E2> E1 = diag(B22, B11).
Block2 covariance_operator(const Block2& b);

/// (1 - c^2 M1 S[.] M2)^{-1} [M1 A M2] with M1 = M_t^{z1}(i eta1),
/// M2 = M_t^{z2}(i eta2). eta1, eta2 are signed and nonzero.
/// Throws NearSingular when the 2x2 stability system is ill conditioned.
Block2 m_two(cplx z1, cplx z2, double eta1, double eta2, const Block2& a, double c = 1.0);

/// Condition number (1-norm) of the stability system used by m_two.
double m_two_condition(cplx z1, cplx z2, double eta1, double eta2, double c = 1.0);

/// 2 sum_{(i,j) in {(1,2),(2,1)}} < m_two(E_i) E_j >.
cplx cov_rate(cplx z1, cplx z2, double eta1, double eta2, double c = 1.0);

/// Closed form of cov_rate(z, conj z, eta, eta, c) in terms of m_t, u_t:
/// 2 (u^2 Re z^2 - c^2 |z|^4 u^4 + c^2 m^4) / (1 + c^4|z|^4 u^4 - c^4 m^4 - 2 c^2 u^2 Re z^2).
cplx cov_rate_conjugate_closed_form(cplx z, double eta, double c = 1.0);

/// Denominator 1 + c^4|z|^4u^4 - c^4 m^4 - 2c^2 u^2 Re z^2 of the closed form.
cplx conjugate_denominator(cplx z, double eta, double c = 1.0);

/// (1/2) log((|z - conj z|^2 + 2 eS1 r) / (|z - conj z|^2 + 2 eS2 r)),
/// r = sqrt(1 - |z|^2). The O(S2 log n) error term is not included.
double real_drift(cplx z, double eta_s1, double eta_s2);

/// log(eS1/eS) + log((|z - conj z|^2 + 2 eS1 r) / (|z - conj z|^2 + 2 eS r)).
/// Nonnegative for eS1 >= eS.
double variance_profile_real(cplx z, double eta_s1, double eta_s);

/// -1/4 log(|z1 - z2|^2 + 1/n), plus -1/4 log(|z1 - conj z2|^2 + 1/n) for
/// the real class.
double kernel_K(cplx z1, cplx z2, int n, SymmetryClass cls);

struct CltMoments {
  double mean_shift;  // beyond n * int log(x^2 + eta^2) rho, Tr f scale
  double variance;    // Tr f scale; P_n scale is variance / 4
};

CltMoments clt_moments(cplx z, double eta, SymmetryClass cls);

}  // namespace rmtlab
