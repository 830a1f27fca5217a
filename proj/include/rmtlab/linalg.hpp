// SPDX-License-Identifier: Apache-2.0
#pragma once

// Thin LAPACK/BLAS wrappers. All routines copy their input.

#include <vector>

#include "rmtlab/ensembles.hpp"

namespace rmtlab::linalg {

/// Pins the BLAS backend to one thread; parallelism lives at trial level.
void pin_blas_threads();

/// Singular values of X - z, descending. Real LAPACK path when both X and z are real.
std::vector<double> singular_values_desc(const MatrixSample& x, cplx z);

/// Eigenvalues of X (unordered).
std::vector<cplx> eigenvalues(const MatrixSample& x);

/// log|det(X - z)| by LU; -inf for an exactly singular factor.
double log_abs_det_shift(const MatrixSample& x, cplx z);

/// sum_{i=1}^n log(lambda_i^2 + eta^2) = log det((X-z)^*(X-z) + eta^2) by Cholesky. eta > 0.
double logdet_gram_shift(const MatrixSample& x, cplx z, double eta);

/// Ascending eigenvalues of a dense Hermitian matrix.
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& h);

/// log|det A| for a dense square matrix (column major) by LU.
double log_abs_det(int dim, std::vector<cplx> a);

}  // namespace rmtlab::linalg
