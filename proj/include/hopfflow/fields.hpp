#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hopfflow/domain.hpp"

namespace hopfflow {

/// Per-axis trigonometric family of a spectral representation. Cos modes are
/// cos(k pi s / L) with k = 0..N-1; Sin modes are sin(k pi s / L) with k = 1..N,
/// where s is the coordinate shifted to start at 0 on each axis.
enum class Parity { Cos, Sin };
using Parities = std::array<Parity, 3>;

inline constexpr Parities kAllCos{Parity::Cos, Parity::Cos, Parity::Cos};

/// Parities of velocity component `comp` for fields with zero normal trace.
Parities velocity_parities(int comp);

struct SpectralData {
  Parities parity = kAllCos;
  std::vector<double> coeffs;  // same flat layout as grid nodes, slot = mode index
};

/// Midpoint-grid cosine/sine transforms, exact interpolation on the nodes.
class SpectralTransform {
 public:
  explicit SpectralTransform(const QuadratureGrid& grid);

  std::vector<double> forward(const std::vector<double>& values, const Parities& p) const;
  std::vector<double> inverse(const std::vector<double>& coeffs, const Parities& p) const;

  /// Mode wavenumber for slot `slot` on `axis` with parity p.
  double wavenumber(int axis, int slot, Parity p) const;
  int mode_number(int slot, Parity p) const { return p == Parity::Cos ? slot : slot + 1; }

  /// Derivative along `axis` in coefficient space; returns new parities too.
  SpectralData derivative(const SpectralData& in, int axis) const;

  const QuadratureGrid& grid() const { return *grid_; }

 private:
  void apply(std::vector<double>& data, int axis, const std::vector<double>& mat) const;

  const QuadratureGrid* grid_;
  // [axis][parity] matrices, row-major N x N.
  std::array<std::array<std::vector<double>, 2>, 3> fwd_;
  std::array<std::array<std::vector<double>, 2>, 3> inv_;
};

struct ScalarField {
  const QuadratureGrid* grid = nullptr;
  std::vector<double> values;
  std::optional<SpectralData> spectral;

  static ScalarField sample(const QuadratureGrid& grid, const std::function<double(const Vec3&)>& fn);
  static ScalarField zeros(const QuadratureGrid& grid);

  std::size_t size() const { return values.size(); }
  /// Throws if sizes mismatch the grid or values are non-finite.
  void check() const;
};

struct VectorField {
  std::array<ScalarField, 3> comp;

  static VectorField sample(const QuadratureGrid& grid, const std::function<Vec3(const Vec3&)>& fn);
  const QuadratureGrid* grid() const { return comp[0].grid; }
};

/// Attach a spectral representation computed from the nodal values.
ScalarField with_spectrum(const SpectralTransform& tr, ScalarField f, const Parities& p);
VectorField with_spectrum(const SpectralTransform& tr, VectorField f);

/// Spectral derivative; requires spectral data present.
ScalarField derivative(const SpectralTransform& tr, const ScalarField& f, int axis);

double integrate(const ScalarField& f);

}  // namespace hopfflow
