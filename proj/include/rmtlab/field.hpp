// SPDX-License-Identifier: Apache-2.0
#pragma once

// Centered, regularized log-characteristic-polynomial field on point meshes.

#include <cstddef>
#include <vector>

#include "rmtlab/common.hpp"
#include "rmtlab/density.hpp"
#include "rmtlab/ensembles.hpp"

namespace rmtlab {

enum class MeshKind { disc, band, epsilon_regular };

std::string_view to_string(MeshKind kind);
MeshKind parse_mesh_kind(std::string_view s);

struct MeshParams {
  cplx center{0.0, 0.0};   // disc, epsilon_regular
  double radius = 0.5;     // disc, epsilon_regular
  double alpha = 0.25;     // band: n^-alpha <= Im z <= 2 n^-alpha
  double half_width = 0.5; // band: |Re z| <= half_width
  std::size_t count = 64;  // disc, band: target point count; epsilon_regular: cluster count
  double eps1 = 0.05;      // epsilon_regular
};

/// Minimum separation, as a multiple of n^{-1/2}, for disc and band meshes.
inline constexpr double kPackingConstant = 0.5;

struct Mesh {
  MeshKind kind = MeshKind::disc;
  int n = 0;
  double spacing = 0.0;     // lattice step (disc, band) or in-cluster step
  std::vector<cplx> points;
  std::vector<int> cluster; // epsilon_regular only: cluster id per point
};

/// Throws InvalidArgument on bad parameters or an infeasible packing.
Mesh build_mesh(MeshKind kind, const MeshParams& params, int n);

/// sum log lambda_i = log|det(X - z)|; -inf if some lambda_i is 0.
double log_charpoly(const HermitizedSpectrum& spectrum);

/// -(1/2) log(|z - conj z|^2 + max(1/n, eta)). Real spectra near the axis
/// lower E log|det(X - z)| by this amount; the sign is fixed by simulation.
double real_class_correction(cplx z, double eta, int n);

/// Psi_n(z, eta) = sum_{i<=n} log(lambda_i^2 + eta^2) - n I(eta) [+ real-class
/// correction], where I(eta) = int log(x^2 + eta^2) rho^z is taken from the
/// profile. eta = 0 with a zero singular value gives -inf.
double psi(const HermitizedSpectrum& spectrum, const DensityProfile& profile, cplx z, double eta, int n,
           SymmetryClass cls);

/// Same, with I(eta) supplied by the caller.
double psi_with_potential(const HermitizedSpectrum& spectrum, double potential, cplx z, double eta,
                          int n, SymmetryClass cls);

struct FieldPoint {
  cplx z;
  double p_n;       // (1/2) sum log(lambda_i^2 + eta^2); log|det(X - z)| at eta = 0
  double psi_n;
  double centered;  // psi_n / 2: P_n minus its deterministic centering
};

struct FieldSample {
  Mesh mesh;
  double eta = 0.0;
  int n = 0;
  SymmetryClass cls = SymmetryClass::complex;
  std::vector<FieldPoint> values;
};

/// Evaluates the field of one matrix on a mesh. At eta = 0 the eigenvalue
/// route sum_j log|mu_j - z| is used with the exact centering n I(0) = 2n phi(z);
/// at eta > 0 each point gets an SVD and I(eta) from its density profile.
FieldSample evaluate_field(const MatrixSample& x, const Mesh& mesh, double eta, SymmetryClass cls);

/// Field from precomputed eigenvalues of X (eta = 0 route only).
FieldSample field_from_eigenvalues(const std::vector<cplx>& eigenvalues, const Mesh& mesh, int n,
                                   SymmetryClass cls);

struct ScanResult {
  cplx argmax;
  double max;
  std::size_t index;
};

/// Exact maximum of `centered`; ties go to the lexicographically smallest (Re, Im).
ScanResult scan_max(const FieldSample& field);

/// max over adjacent pairs (|dz| <= 1.5 x smallest pair distance) of
/// |d psi| sqrt(eta) / |dz|.
double lipschitz_diagnostic(const FieldSample& field);

}  // namespace rmtlab
