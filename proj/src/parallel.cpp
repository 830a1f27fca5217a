// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/parallel.hpp"

#include <algorithm>

namespace rmtlab {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace rmtlab
