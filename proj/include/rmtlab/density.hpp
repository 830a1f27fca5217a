// SPDX-License-Identifier: Apache-2.0
#pragma once

// Limiting symmetric density rho^z of the Hermitization, its edge and
// n-quantiles, and the deterministic centering quantities built from it.

#include <vector>

#include "rmtlab/common.hpp"

namespace rmtlab {

struct DensityProfile {
  cplx z;
  double edge = 0.0;           // support is [-edge, edge]
  std::vector<double> grid;    // strictly increasing, spans [-edge, edge]
  std::vector<double> rho;     // rho(grid[k])

  // Cumulative table in s = sqrt(edge - x): mass_above[k] = int_{x_k}^{edge} rho,
  // with x_k = edge - s_k^2 and s_k = sqrt(edge) * k / (size - 1).
  std::vector<double> s_nodes;
  std::vector<double> mass_above;

  double tol = 1e-8;

  /// int_{-edge}^{edge} rho by adaptive quadrature.
  double mass() const { return 2.0 * (mass_above.empty() ? 0.0 : mass_above.back()); }
  /// int_0^x rho, odd in x.
  double cumulative(double x) const;
  /// Trapezoidal integral over the stored grid (coarse; edge error ~ h^1.5).
  double trapezoid_mass() const;
};

/// (1/pi) Im m^z(x + i eta0) with a two-point extrapolation eta0 -> 0,
/// eta0 = 1e-8. Clamped at 0.
double density_at(cplx z, double x);

/// Bisection on the vanishing of the extrapolated Im m; bracket width <= tol.
double find_edge(cplx z, double tol = 1e-8);

/// Requires |z| <= 0.99 and grid_size >= 64. Throws ProfileFailure when the
/// edge cannot be bracketed.
DensityProfile build_density(cplx z, int grid_size = 256, double tol = 1e-8);

/// gamma_i with int_0^{gamma_i} rho = i / (2n), i in [-n, n] \ {0}.
double quantile(const DensityProfile& profile, int i, int n);

/// gamma_1 .. gamma_n (the positive half); gamma_{-i} = -gamma_i.
std::vector<double> quantiles(const DensityProfile& profile, int n);

/// (log|z|)_+ - (1 - |z|^2)_+ / 2.
double phi(cplx z);

/// E_n(z): n phi(z), plus (1/4) log(|z - conj z|^2 + 1/n) for the real class.
double expected_centering(cplx z, int n, SymmetryClass cls);

/// int log(x^2 + eta^2) rho^z(x) dx, eta >= 0, by Gauss-Kronrod against the
/// profile with an x = edge - s^2 substitution near the edge.
double log_potential(const DensityProfile& profile, double eta);

/// Same integral for the time-scaled density rho_t with c = c_star(t);
/// `scaled_profile` must be the profile at z / c.
double log_potential_scaled(const DensityProfile& scaled_profile, double eta, double c);

}  // namespace rmtlab
