#include "hopfflow/domain.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace hopfflow {

void validate(const DomainSpec& spec) {
  if (!(spec.L1 > 0.0) || !(spec.L2 > 0.0) || !(spec.a > 0.0))
    throw std::invalid_argument(
        fmt::format("domain dimensions must be positive (L1={}, L2={}, a={})", spec.L1, spec.L2,
                    spec.a));
  for (int axis = 0; axis < 3; ++axis) {
    const int n = spec.points(axis);
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument(
          fmt::format("quadrature points on axis {} must be even and >= 4, got {}", axis + 1, n));
  }
}

double BoundaryPatch::area() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::string BoundaryPatch::name() const {
  switch (kind) {
    case PatchKind::LowerCap:
      return "S2(-a)";
    case PatchKind::UpperCap:
      return "S2(+a)";
    default:
      return fmt::format("S1[{}]", face);
  }
}

QuadratureGrid::QuadratureGrid(const DomainSpec& spec) : spec_(spec) {
  validate(spec);
  size_ = static_cast<std::size_t>(spec.N1) * spec.N2 * spec.N3;
  for (int axis = 0; axis < 3; ++axis) {
    const int n = spec.points(axis);
    const double len = spec.length(axis);
    const double lo = axis == 2 ? -spec.a : 0.0;
    h_[axis] = len / n;
    coords_[axis].resize(n);
    for (int i = 0; i < n; ++i) coords_[axis][i] = lo + (i + 0.5) * h_[axis];
  }
}

std::array<int, 3> QuadratureGrid::ijk(std::size_t idx) const {
  const int k = static_cast<int>(idx % spec_.N3);
  const std::size_t rest = idx / spec_.N3;
  const int j = static_cast<int>(rest % spec_.N2);
  const int i = static_cast<int>(rest / spec_.N2);
  return {i, j, k};
}

Vec3 QuadratureGrid::point(std::size_t idx) const {
  const auto [i, j, k] = ijk(idx);
  return {coords_[0][i], coords_[1][j], coords_[2][k]};
}

namespace {

BoundaryPatch lateral(const QuadratureGrid& grid, int face) {
  const DomainSpec& s = grid.spec();
  BoundaryPatch p;
  p.kind = PatchKind::Lateral;
  p.face = face;
  // Face-normal axis and its position.
  const int axis = face <= 2 ? 0 : 1;
  const bool upper = face == 2 || face == 4;
  const double pos = upper ? s.length(axis) : 0.0;
  p.normal = {0.0, 0.0, 0.0};
  p.normal[axis] = upper ? 1.0 : -1.0;
  p.tau1 = {-p.normal[1], p.normal[0], 0.0};
  p.tau2 = {0.0, 0.0, 1.0};
  const int other = 1 - axis;
  for (int i = 0; i < grid.n(other); ++i) {
    for (int k = 0; k < grid.n(2); ++k) {
      Vec3 x{};
      x[axis] = pos;
      x[other] = grid.coord(other, i);
      x[2] = grid.coord(2, k);
      p.nodes.push_back(x);
      p.weights.push_back(grid.axis_weight(other) * grid.axis_weight(2));
    }
  }
  return p;
}

BoundaryPatch cap(const QuadratureGrid& grid, bool upper) {
  const DomainSpec& s = grid.spec();
  BoundaryPatch p;
  p.kind = upper ? PatchKind::UpperCap : PatchKind::LowerCap;
  p.normal = {0.0, 0.0, upper ? 1.0 : -1.0};
  p.tau1 = {1.0, 0.0, 0.0};
  p.tau2 = {0.0, 1.0, 0.0};
  for (int i = 0; i < s.N1; ++i)
    for (int j = 0; j < s.N2; ++j) {
      p.nodes.push_back({grid.coord(0, i), grid.coord(1, j), upper ? s.a : -s.a});
      p.weights.push_back(grid.axis_weight(0) * grid.axis_weight(1));
    }
  return p;
}

}  // namespace

Domain build_domain(const DomainSpec& spec) {
  QuadratureGrid grid(spec);
  std::vector<BoundaryPatch> patches;
  for (int face = 1; face <= 4; ++face) patches.push_back(lateral(grid, face));
  patches.push_back(cap(grid, false));
  patches.push_back(cap(grid, true));
  return Domain{spec, std::move(patches), std::move(grid)};
}

double dist_to_caps(double x3, const DomainSpec& spec) {
  const double slack = 1e-12 * spec.a;
  if (x3 < -spec.a - slack || x3 > spec.a + slack)
    throw std::out_of_range(fmt::format("x3={} outside [-a, a] with a={}", x3, spec.a));
  return std::max(0.0, std::min(spec.a - x3, x3 + spec.a));
}

}  // namespace hopfflow
