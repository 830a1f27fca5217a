// SPDX-License-Identifier: Apache-2.0
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "rmtlab/linalg.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace rmtlab::linalg {

namespace {

void check(lapack_int info, const char* routine) {
  if (info != 0)
    throw NumericalFailure(std::string(routine) + " failed with info = " + std::to_string(info));
}

std::vector<cplx> shifted(const MatrixSample& x, cplx z) {
  std::vector<cplx> a = x.a;
  for (int i = 0; i < x.n; ++i) a[static_cast<std::size_t>(i) * x.n + i] -= z;
  return a;
}

std::vector<double> shifted_real(const MatrixSample& x, double z) {
  std::vector<double> a(x.a.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = x.a[k].real();
  for (int i = 0; i < x.n; ++i) a[static_cast<std::size_t>(i) * x.n + i] -= z;
  return a;
}

bool real_path(const MatrixSample& x, cplx z) { return x.is_real && z.imag() == 0.0; }

}  // namespace

void pin_blas_threads() {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

std::vector<double> singular_values_desc(const MatrixSample& x, cplx z) {
  pin_blas_threads();
  const int n = x.n;
  std::vector<double> s(static_cast<std::size_t>(n));
  if (n == 0) return s;
  if (real_path(x, z)) {
    auto a = shifted_real(x, z.real());
    check(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(), nullptr, 1, nullptr, 1),
          "dgesdd");
  } else {
    auto a = shifted(x, z);
    check(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(), nullptr, 1, nullptr, 1),
          "zgesdd");
  }
  return s;
}

std::vector<cplx> eigenvalues(const MatrixSample& x) {
  pin_blas_threads();
  const int n = x.n;
  std::vector<cplx> ev(static_cast<std::size_t>(n));
  if (n == 0) return ev;
  if (x.is_real) {
    auto a = shifted_real(x, 0.0);
    std::vector<double> wr(n), wi(n);
    check(LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), nullptr, 1,
                        nullptr, 1),
          "dgeev");
    for (int i = 0; i < n; ++i) ev[i] = cplx(wr[i], wi[i]);
  } else {
    auto a = x.a;
    check(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, ev.data(), nullptr, 1, nullptr, 1),
          "zgeev");
  }
  return ev;
}

double log_abs_det(int dim, std::vector<cplx> a) {
  pin_blas_threads();
  if (dim == 0) return 0.0;
  std::vector<lapack_int> piv(static_cast<std::size_t>(dim));
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, dim, dim, a.data(), dim, piv.data());
  if (info < 0) check(info, "zgetrf");
  if (info > 0) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += std::log(std::abs(a[static_cast<std::size_t>(i) * dim + i]));
  return acc;
}

double log_abs_det_shift(const MatrixSample& x, cplx z) {
  pin_blas_threads();
  const int n = x.n;
  if (!real_path(x, z)) return log_abs_det(n, shifted(x, z));
  auto a = shifted_real(x, z.real());
  std::vector<lapack_int> piv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, a.data(), n, piv.data());
  if (info < 0) check(info, "dgetrf");
  if (info > 0) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::log(std::abs(a[static_cast<std::size_t>(i) * n + i]));
  return acc;
}

double logdet_gram_shift(const MatrixSample& x, cplx z, double eta) {
  pin_blas_threads();
  if (!(eta > 0.0)) throw InvalidArgument("eta", "must be positive");
  const int n = x.n;
  const double eta2 = eta * eta;
  double acc = 0.0;
  if (real_path(x, z)) {
    const auto a = shifted_real(x, z.real());
    std::vector<double> c(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i) * n + i] = eta2;
    cblas_dsyrk(CblasColMajor, CblasLower, CblasTrans, n, n, 1.0, a.data(), n, 1.0, c.data(), n);
    check(LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, c.data(), n), "dpotrf");
    for (int i = 0; i < n; ++i) acc += std::log(c[static_cast<std::size_t>(i) * n + i]);
  } else {
    const auto a = shifted(x, z);
    std::vector<cplx> c(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i) * n + i] = eta2;
    cblas_zherk(CblasColMajor, CblasLower, CblasConjTrans, n, n, 1.0, a.data(), n, 1.0, c.data(), n);
    check(LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n, c.data(), n), "zpotrf");
    for (int i = 0; i < n; ++i) acc += std::log(c[static_cast<std::size_t>(i) * n + i].real());
  }
  return 2.0 * acc;
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& h) {
  pin_blas_threads();
  auto a = h.a;
  std::vector<double> w(static_cast<std::size_t>(h.dim));
  if (h.dim == 0) return w;
  check(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', h.dim, a.data(), h.dim, w.data()), "zheevd");
  return w;
}

}  // namespace rmtlab::linalg
