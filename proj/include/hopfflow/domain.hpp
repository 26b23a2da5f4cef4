#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace hopfflow {

using Vec3 = std::array<double, 3>;

/// Box cylinder (0,L1) x (0,L2) x (-a,a). The lateral faces form S1, the two
/// end caps x3 = -a and x3 = +a form S2. Quadrature resolution is N1 x N2 x N3.
struct DomainSpec {
  double L1 = 1.0;
  double L2 = 1.0;
  double a = 1.0;
  int N1 = 16;
  int N2 = 16;
  int N3 = 32;

  double height() const { return 2.0 * a; }
  double cap_area() const { return L1 * L2; }
  double volume() const { return L1 * L2 * 2.0 * a; }
  double length(int axis) const { return axis == 0 ? L1 : axis == 1 ? L2 : 2.0 * a; }
  int points(int axis) const { return axis == 0 ? N1 : axis == 1 ? N2 : N3; }
};

/// Throws std::invalid_argument if the domain description is unusable.
void validate(const DomainSpec& spec);

enum class PatchKind { Lateral, LowerCap, UpperCap };

struct BoundaryPatch {
  PatchKind kind = PatchKind::Lateral;
  int face = 0;  // 1..4 for lateral faces (x1=0, x1=L1, x2=0, x2=L2); 0 for caps
  Vec3 normal{};
  Vec3 tau1{};
  Vec3 tau2{};
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  double area() const;
  std::string name() const;
};

/// Tensor-product midpoint grid. Flat node index is (i*N2 + j)*N3 + k,
/// with k (the x3 axis) running fastest.
class QuadratureGrid {
 public:
  explicit QuadratureGrid(const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  std::size_t size() const { return size_; }
  int n(int axis) const { return spec_.points(axis); }

  /// Axis node coordinate. Axis 2 returns x3 in (-a, a).
  double coord(int axis, int index) const { return coords_[axis][index]; }
  const std::vector<double>& coords(int axis) const { return coords_[axis]; }
  double axis_weight(int axis) const { return h_[axis]; }
  double weight() const { return h_[0] * h_[1] * h_[2]; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * spec_.N2 + j) * spec_.N3 + k;
  }
  Vec3 point(std::size_t idx) const;
  std::array<int, 3> ijk(std::size_t idx) const;

  double weight_sum() const { return weight() * static_cast<double>(size_); }

 private:
  DomainSpec spec_;
  std::size_t size_ = 0;
  std::array<std::vector<double>, 3> coords_;
  std::array<double, 3> h_{};
};

struct Domain {
  DomainSpec spec;
  std::vector<BoundaryPatch> patches;  // 4 lateral faces, lower cap, upper cap
  QuadratureGrid grid;

  const BoundaryPatch& lower_cap() const { return patches[4]; }
  const BoundaryPatch& upper_cap() const { return patches[5]; }
};

Domain build_domain(const DomainSpec& spec);

/// Distance from x3 to the nearer end cap (weight of the weighted norms).
double dist_to_caps(double x3, const DomainSpec& spec);

}  // namespace hopfflow
