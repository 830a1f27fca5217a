// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/common.hpp"

namespace rmtlab {

std::string_view to_string(SymmetryClass cls) { return cls == SymmetryClass::real ? "real" : "complex"; }

SymmetryClass parse_symmetry_class(std::string_view s) {
  if (s == "real") return SymmetryClass::real;
  if (s == "complex") return SymmetryClass::complex;
  throw InvalidArgument("class", "expected real|complex");
}

}  // namespace rmtlab
