#include "hopfflow/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace hopfflow {

Parities velocity_parities(int comp) {
  Parities p = kAllCos;
  p[comp] = Parity::Sin;
  return p;
}

SpectralTransform::SpectralTransform(const QuadratureGrid& grid) : grid_(&grid) {
  for (int axis = 0; axis < 3; ++axis) {
    const int n = grid.n(axis);
    for (int par = 0; par < 2; ++par) {
      auto& f = fwd_[axis][par];
      auto& b = inv_[axis][par];
      f.assign(static_cast<std::size_t>(n) * n, 0.0);
      b.assign(static_cast<std::size_t>(n) * n, 0.0);
      for (int slot = 0; slot < n; ++slot) {
        const int k = par == 0 ? slot : slot + 1;
        const bool edge = par == 0 ? k == 0 : k == n;
        const double scale = (edge ? 1.0 : 2.0) / n;
        for (int j = 0; j < n; ++j) {
          const double arg = std::numbers::pi * k * (j + 0.5) / n;
          const double basis = par == 0 ? std::cos(arg) : std::sin(arg);
          f[static_cast<std::size_t>(slot) * n + j] = scale * basis;
          b[static_cast<std::size_t>(j) * n + slot] = basis;
        }
      }
    }
  }
}

void SpectralTransform::apply(std::vector<double>& data, int axis, const std::vector<double>& mat) const {
  const int n1 = grid_->n(0), n2 = grid_->n(1), n3 = grid_->n(2);
  const int n = grid_->n(axis);
  std::vector<double> line(n), out(n);
  const std::array<int, 3> dims{n1, n2, n3};
  const std::array<std::size_t, 3> stride{static_cast<std::size_t>(n2) * n3,
                                          static_cast<std::size_t>(n3), 1};
  const int a1 = axis == 0 ? 1 : 0;
  const int a2 = axis == 2 ? 1 : 2;
  for (int p = 0; p < dims[a1]; ++p) {
    for (int q = 0; q < dims[a2]; ++q) {
      const std::size_t base = p * stride[a1] + q * stride[a2];
      for (int i = 0; i < n; ++i) line[i] = data[base + i * stride[axis]];
      for (int r = 0; r < n; ++r) {
        double s = 0.0;
        const double* row = &mat[static_cast<std::size_t>(r) * n];
        for (int c = 0; c < n; ++c) s += row[c] * line[c];
        out[r] = s;
      }
      for (int i = 0; i < n; ++i) data[base + i * stride[axis]] = out[i];
    }
  }
}

std::vector<double> SpectralTransform::forward(const std::vector<double>& values, const Parities& p) const {
  std::vector<double> data = values;
  for (int axis = 0; axis < 3; ++axis) apply(data, axis, fwd_[axis][p[axis] == Parity::Cos ? 0 : 1]);
  return data;
}

std::vector<double> SpectralTransform::inverse(const std::vector<double>& coeffs, const Parities& p) const {
  std::vector<double> data = coeffs;
  for (int axis = 0; axis < 3; ++axis) apply(data, axis, inv_[axis][p[axis] == Parity::Cos ? 0 : 1]);
  return data;
}

double SpectralTransform::wavenumber(int axis, int slot, Parity p) const {
  return std::numbers::pi * mode_number(slot, p) / grid_->spec().length(axis);
}

SpectralData SpectralTransform::derivative(const SpectralData& in, int axis) const {
  SpectralData out;
  out.parity = in.parity;
  const Parity from = in.parity[axis];
  out.parity[axis] = from == Parity::Cos ? Parity::Sin : Parity::Cos;
  out.coeffs.assign(in.coeffs.size(), 0.0);
  const int n = grid_->n(axis);
  for (std::size_t idx = 0; idx < in.coeffs.size(); ++idx) {
    const auto ijk = grid_->ijk(idx);
    const int slot = ijk[axis];
    const double kappa = wavenumber(axis, slot, from);
    auto target = ijk;
    if (from == Parity::Cos) {
      // cos k -> -kappa sin k, k >= 1 lives in sin slot k-1.
      if (slot == 0) continue;
      target[axis] = slot - 1;
      out.coeffs[grid_->index(target[0], target[1], target[2])] = -kappa * in.coeffs[idx];
    } else {
      // sin k -> kappa cos k; k = N is the Nyquist mode and vanishes on the nodes.
      const int k = slot + 1;
      if (k >= n) continue;
      target[axis] = k;
      out.coeffs[grid_->index(target[0], target[1], target[2])] = kappa * in.coeffs[idx];
    }
  }
  return out;
}

ScalarField ScalarField::sample(const QuadratureGrid& grid, const std::function<double(const Vec3&)>& fn) {
  ScalarField f;
  f.grid = &grid;
  f.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = fn(grid.point(i));
  return f;
}

ScalarField ScalarField::zeros(const QuadratureGrid& grid) {
  ScalarField f;
  f.grid = &grid;
  f.values.assign(grid.size(), 0.0);
  return f;
}

void ScalarField::check() const {
  if (grid == nullptr) throw std::invalid_argument("field has no grid");
  if (values.size() != grid->size())
    throw std::invalid_argument(
        fmt::format("field has {} values, grid has {} nodes", values.size(), grid->size()));
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("field contains non-finite values");
}

VectorField VectorField::sample(const QuadratureGrid& grid, const std::function<Vec3(const Vec3&)>& fn) {
  VectorField v;
  for (auto& c : v.comp) c = ScalarField::zeros(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 val = fn(grid.point(i));
    for (int c = 0; c < 3; ++c) v.comp[c].values[i] = val[c];
  }
  return v;
}

ScalarField with_spectrum(const SpectralTransform& tr, ScalarField f, const Parities& p) {
  f.check();
  f.spectral = SpectralData{p, tr.forward(f.values, p)};
  return f;
}

VectorField with_spectrum(const SpectralTransform& tr, VectorField f) {
  for (int c = 0; c < 3; ++c) f.comp[c] = with_spectrum(tr, std::move(f.comp[c]), velocity_parities(c));
  return f;
}

ScalarField derivative(const SpectralTransform& tr, const ScalarField& f, int axis) {
  if (!f.spectral) throw std::invalid_argument("derivative requires spectral coefficients");
  ScalarField d;
  d.grid = f.grid;
  d.spectral = tr.derivative(*f.spectral, axis);
  d.values = tr.inverse(d.spectral->coeffs, d.spectral->parity);
  return d;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid->weight();
}

}  // namespace hopfflow
