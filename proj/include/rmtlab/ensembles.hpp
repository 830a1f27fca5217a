// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rmtlab/common.hpp"

namespace rmtlab {

enum class BaseLaw { gaussian, rademacher, custom };

std::string_view to_string(BaseLaw law);
BaseLaw parse_base_law(std::string_view s);

struct EnsembleSpec {
  SymmetryClass cls = SymmetryClass::complex;
  BaseLaw law = BaseLaw::gaussian;
  int n = 0;
  double gaussian_component = 0.0;  // a: chi = sqrt(1-a) chi' + sqrt(a) g
  double ginibre_component = 0.0;   // t: X = sqrt(1-t) Y + sqrt(t) G, G complex Ginibre
  // Three-point law per real component: +-1/sqrt(p) with prob. p/2 each, 0
  // otherwise. Mean 0, variance 1, fourth moment 1/p.
  double custom_p = 0.5;

  void validate() const;  // throws InvalidArgument
};

/// n x n matrix, column major, entries of variance 1/n.
struct MatrixSample {
  EnsembleSpec spec;
  int n = 0;
  bool is_real = false;  // every entry has zero imaginary part
  std::vector<cplx> a;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(j) * n + i]; }
  cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(j) * n + i]; }
};

MatrixSample sample(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t trial);

/// Wraps explicit entries (column major). is_real is detected.
MatrixSample matrix_from_entries(int n, std::vector<cplx> entries);

/// Dense 2n x 2n Hermitization [[0, X - z], (X - z)^*, 0]], column major.
struct HermitianMatrix {
  int dim = 0;
  std::vector<cplx> a;
  cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(j) * dim + i]; }
};

HermitianMatrix hermitize(const MatrixSample& x, cplx z);

/// Ascending singular values of X - z (the positive spectrum of H^z).
struct HermitizedSpectrum {
  cplx z;
  std::vector<double> lambda;
};

HermitizedSpectrum singular_values(const MatrixSample& x, cplx z);

/// <(H^z - w)^{-1}> = (1/2n) sum_{i=1}^{n} [1/(lambda_i - w) + 1/(-lambda_i - w)].
cplx resolvent_trace(const HermitizedSpectrum& spectrum, cplx w);

struct TailRow {
  double s;
  std::size_t hits;    // trials with lambda_1 <= s / n
  std::size_t trials;
  double frequency;
  double ci_low;       // Clopper-Pearson 95%
  double ci_high;
};

/// n lambda_1(X - z) per trial.
std::vector<double> smallest_sv_samples(const EnsembleSpec& spec, cplx z, std::size_t trials,
                                        std::uint64_t seed, int workers = 1);

/// Empirical P[lambda_1(X - z) <= s/n] for each s.
std::vector<TailRow> smallest_sv_tail(const EnsembleSpec& spec, cplx z,
                                      const std::vector<double>& s_grid, std::size_t trials,
                                      std::uint64_t seed, int workers = 1);

/// Tail table from precomputed smallest singular values (already times n).
std::vector<TailRow> tail_table(const std::vector<double>& n_lambda1,
                                const std::vector<double>& s_grid);

/// max over 1 <= i <= i_max of n |lambda_i - gamma_i| / log n, with gamma the
/// positive quantiles gamma_1..gamma_n.
double rigidity_statistic(const HermitizedSpectrum& spectrum, const std::vector<double>& gamma,
                          int i_max);

}  // namespace rmtlab
