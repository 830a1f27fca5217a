// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtlab/field.hpp"

namespace rmtlab {

std::string_view to_string(MeshKind kind) {
  switch (kind) {
    case MeshKind::disc: return "disc";
    case MeshKind::band: return "band";
    case MeshKind::epsilon_regular: return "epsilon-regular";
  }
  return "?";
}

MeshKind parse_mesh_kind(std::string_view s) {
  if (s == "disc") return MeshKind::disc;
  if (s == "band") return MeshKind::band;
  if (s == "epsilon-regular" || s == "epsilon_regular") return MeshKind::epsilon_regular;
  throw InvalidArgument("mesh.kind", "expected disc|band|epsilon-regular, got '" + std::string(s) + "'");
}

namespace {

double min_separation(int n) { return kPackingConstant / std::sqrt(static_cast<double>(n)); }

Mesh disc_mesh(const MeshParams& p, int n) {
  if (!(p.radius > 0.0 && p.radius < 1.0)) throw InvalidArgument("mesh.radius", "must lie in (0, 1)");
  if (std::abs(p.center) + p.radius >= 1.0)
    throw InvalidArgument("mesh.radius", "disc must lie inside the unit disc");
  if (p.count < 1) throw InvalidArgument("mesh.count", "must be >= 1");
  Mesh m;
  m.kind = MeshKind::disc;
  m.n = n;
  const double h = std::sqrt(std::numbers::pi * p.radius * p.radius / static_cast<double>(p.count));
  m.spacing = h;
  if (p.count == 1) {
    m.points.push_back(p.center);
    return m;
  }
  if (h < min_separation(n)) throw InvalidArgument("mesh.count", "infeasible packing: spacing below c n^-1/2");
  const int k = static_cast<int>(std::ceil(p.radius / h));
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) {
      const cplx z(i * h, j * h);
      if (std::abs(z) < p.radius) m.points.push_back(p.center + z);
    }
  return m;
}

Mesh band_mesh(const MeshParams& p, int n) {
  if (!(p.alpha > 0.0 && p.alpha < 0.5)) throw InvalidArgument("mesh.alpha", "must lie in (0, 1/2)");
  if (!(p.half_width > 0.0)) throw InvalidArgument("mesh.half_width", "must be positive");
  if (p.count < 1) throw InvalidArgument("mesh.count", "must be >= 1");
  const double lo = std::pow(static_cast<double>(n), -p.alpha);
  const double height = lo;  // [lo, 2 lo]
  const double width = 2.0 * p.half_width;
  if (std::hypot(p.half_width, 2.0 * lo) >= 1.0) throw InvalidArgument("mesh", "band leaves the unit disc");
  const double h = std::sqrt(width * height / static_cast<double>(p.count));
  const int rows = std::max(1, static_cast<int>(std::lround(height / h)));
  const int cols = std::max(1, static_cast<int>(std::lround(static_cast<double>(p.count) / rows)));
  const double dx = width / cols;
  const double dy = height / rows;
  Mesh m;
  m.kind = MeshKind::band;
  m.n = n;
  m.spacing = std::min(dx, rows > 1 ? dy : dx);
  if (p.count > 1 && m.spacing < min_separation(n))
    throw InvalidArgument("mesh.count", "infeasible packing: spacing below c n^-1/2");
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i)
      m.points.emplace_back(-p.half_width + (i + 0.5) * dx, lo + (j + 0.5) * dy);
  return m;
}

// First k points of the unit triangular lattice ordered by distance to 0.
std::vector<cplx> hex_cluster(int k) {
  const cplx e1(1.0, 0.0);
  const cplx e2(0.5, std::sqrt(3.0) / 2.0);
  const int r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k)))) + 2;
  std::vector<cplx> pts;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) pts.push_back(static_cast<double>(a) * e1 + static_cast<double>(b) * e2);
  std::sort(pts.begin(), pts.end(), [](cplx x, cplx y) {
    const double dx = std::norm(x), dy = std::norm(y);
    if (std::abs(dx - dy) > 1e-9) return dx < dy;
    return std::arg(x) < std::arg(y);
  });
  pts.resize(static_cast<std::size_t>(k));
  return pts;
}

Mesh epsilon_regular_mesh(const MeshParams& p, int n) {
  if (!(p.eps1 > 0.0 && p.eps1 < 0.1)) throw InvalidArgument("mesh.eps1", "must lie in (0, 1/10)");
  if (!(p.radius > 0.0 && p.radius < 1.0)) throw InvalidArgument("mesh.radius", "must lie in (0, 1)");
  if (p.count < 1) throw InvalidArgument("mesh.count", "need at least one cluster");
  const double nn = static_cast<double>(n);
  const double lower = std::pow(nn, p.eps1 - 0.5);
  const double upper = std::pow(nn, 2.0 * p.eps1 - 0.5);
  const int k = std::max(2, static_cast<int>(std::ceil(std::log(nn))));
  const double step = lower * (1.0 + 1e-9);
  auto shape = hex_cluster(k);
  double diam = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i)
    for (std::size_t j = i + 1; j < shape.size(); ++j) diam = std::max(diam, std::abs(shape[i] - shape[j]));
  if (diam * step > upper)
    throw InvalidArgument("mesh.eps1", "infeasible: a cluster of ceil(log n) points cannot fit the distance window");
  // Cluster centres on a square lattice inside the disc, far enough apart
  // that clusters never interleave.
  const double sep = 2.0 * diam * step + upper;
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p.count))));
  if (sep * side > std::numbers::sqrt2 * p.radius)
    throw InvalidArgument("mesh.count", "infeasible: clusters do not fit in the disc");
  Mesh m;
  m.kind = MeshKind::epsilon_regular;
  m.n = n;
  m.spacing = step;
  const double offset = 0.5 * (side - 1) * sep;
  for (std::size_t c = 0; c < p.count; ++c) {
    const int i = static_cast<int>(c) % side;
    const int j = static_cast<int>(c) / side;
    const cplx centre = p.center + cplx(i * sep - offset, j * sep - offset);
    for (cplx s : shape) {
      m.points.push_back(centre + step * s);
      m.cluster.push_back(static_cast<int>(c));
    }
  }
  return m;
}

}  // namespace

Mesh build_mesh(MeshKind kind, const MeshParams& params, int n) {
  if (n < 2) throw InvalidArgument("n", "must be >= 2");
  switch (kind) {
    case MeshKind::disc: return disc_mesh(params, n);
    case MeshKind::band: return band_mesh(params, n);
    case MeshKind::epsilon_regular: return epsilon_regular_mesh(params, n);
  }
  throw InvalidArgument("mesh.kind", "unknown");
}

}  // namespace rmtlab
