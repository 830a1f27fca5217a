// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rmtlab/linalg.hpp"
#include "rmtlab/simd/kernels.hpp"

namespace rmtlab {

double log_charpoly(const HermitizedSpectrum& spectrum) {
  double acc = 0.0;
  for (double l : spectrum.lambda) {
    if (l == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(l);
  }
  return acc;
}

double real_class_correction(cplx z, double eta, int n) {
  const double gap = 2.0 * z.imag();
  return -0.5 * std::log(gap * gap + std::max(1.0 / n, eta));
}

double psi_with_potential(const HermitizedSpectrum& spectrum, double potential, cplx z, double eta, int n,
                          SymmetryClass cls) {
  if (eta < 0.0) throw InvalidArgument("eta", "must be >= 0");
  double sum;
  if (eta == 0.0) {
    sum = 2.0 * log_charpoly(spectrum);
  } else {
    sum = simd::sum_log_sq_shift(spectrum.lambda, eta * eta);
  }
  double v = sum - n * potential;
  if (cls == SymmetryClass::real) v += real_class_correction(z, eta, n);
  return v;
}

double psi(const HermitizedSpectrum& spectrum, const DensityProfile& profile, cplx z, double eta, int n,
           SymmetryClass cls) {
  if (std::abs(std::norm(profile.z) - std::norm(z)) > 1e-12)
    throw InvalidArgument("profile", "profile does not match z");
  return psi_with_potential(spectrum, log_potential(profile, eta), z, eta, n, cls);
}

FieldSample field_from_eigenvalues(const std::vector<cplx>& eigenvalues, const Mesh& mesh, int n,
                                   SymmetryClass cls) {
  std::vector<double> re(eigenvalues.size()), im(eigenvalues.size());
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    re[k] = eigenvalues[k].real();
    im[k] = eigenvalues[k].imag();
  }
  FieldSample f;
  f.mesh = mesh;
  f.eta = 0.0;
  f.n = n;
  f.cls = cls;
  f.values.reserve(mesh.points.size());
  for (cplx z : mesh.points) {
    const double p = simd::sum_log_abs_diff(re, im, z);
    double v = 2.0 * p - 2.0 * n * phi(z);
    if (cls == SymmetryClass::real) v += real_class_correction(z, 0.0, n);
    f.values.push_back({z, p, v, 0.5 * v});
  }
  return f;
}

FieldSample evaluate_field(const MatrixSample& x, const Mesh& mesh, double eta, SymmetryClass cls) {
  if (eta < 0.0) throw InvalidArgument("eta", "must be >= 0");
  if (eta == 0.0) return field_from_eigenvalues(linalg::eigenvalues(x), mesh, x.n, cls);

  FieldSample f;
  f.mesh = mesh;
  f.eta = eta;
  f.n = x.n;
  f.cls = cls;
  // I(eta) depends on z only through |z|.
  std::map<double, double> potential_cache;
  for (cplx z : mesh.points) {
    const double key = std::norm(z);
    auto it = potential_cache.find(key);
    if (it == potential_cache.end())
      it = potential_cache.emplace(key, log_potential(build_density(cplx(std::sqrt(key)), 64), eta)).first;
    const HermitizedSpectrum s = singular_values(x, z);
    const double v = psi_with_potential(s, it->second, z, eta, x.n, cls);
    const double p = 0.5 * simd::sum_log_sq_shift(s.lambda, eta * eta);
    f.values.push_back({z, p, v, 0.5 * v});
  }
  return f;
}

ScanResult scan_max(const FieldSample& field) {
  const auto& vals = field.values;
  if (vals.empty()) throw InvalidArgument("field", "empty field");
  std::vector<double> c(vals.size());
  for (std::size_t k = 0; k < vals.size(); ++k) c[k] = vals[k].centered;
  std::size_t best = simd::argmax(c);
  const double top = c[best];
  auto lex_less = [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  };
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] == top && lex_less(vals[k].z, vals[best].z)) best = k;
  return {vals[best].z, top, best};
}

double lipschitz_diagnostic(const FieldSample& field) {
  const auto& v = field.values;
  if (v.size() < 2) throw InvalidArgument("field", "needs at least two points");
  if (field.eta < 1.0 / field.n) throw InvalidArgument("eta", "must be >= 1/n");
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) dmin = std::min(dmin, std::abs(v[i].z - v[j].z));
  if (!(dmin > 0.0)) throw InvalidArgument("mesh", "duplicate points");
  const double reach = 1.5 * dmin;
  const double root_eta = std::sqrt(field.eta);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double d = std::abs(v[i].z - v[j].z);
      if (d <= reach) worst = std::max(worst, std::abs(v[i].psi_n - v[j].psi_n) * root_eta / d);
    }
  return worst;
}

}  // namespace rmtlab
