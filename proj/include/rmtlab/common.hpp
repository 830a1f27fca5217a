// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rmtlab {

using cplx = std::complex<double>;

enum class SymmetryClass { real, complex };

std::string_view to_string(SymmetryClass cls);
SymmetryClass parse_symmetry_class(std::string_view s);

/// Root of the library's error hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver gave up; carries the best residual reached.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class ProfileFailure : public Error {
 public:
  using Error::Error;
};

/// Linear system too close to singular; carries a condition estimate.
class NearSingular : public Error {
 public:
  NearSingular(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// LAPACK, ODE or quadrature failure.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Rejected parameters or config; `field` names the offending input.
class InvalidArgument : public Error {
 public:
  InvalidArgument(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace rmtlab
