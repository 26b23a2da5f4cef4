#include "hopfflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hopfflow {

namespace {

void check_exponent(double p, const char* what) {
  if (!(p >= 1.0)) throw std::invalid_argument(fmt::format("{} must be in [1, inf], got {}", what, p));
}

using MultiIndex = std::vector<int>;  // sequence of differentiation axes

/// Multi-indices with |alpha| == order, each counted once.
std::vector<MultiIndex> multi_indices(int order) {
  std::vector<MultiIndex> out;
  if (order == 0) return {MultiIndex{}};
  for (const auto& lower : multi_indices(order - 1)) {
    const int start = lower.empty() ? 0 : lower.back();
    for (int ax = start; ax < 3; ++ax) {
      MultiIndex m = lower;
      m.push_back(ax);
      out.push_back(std::move(m));
    }
  }
  return out;
}

/// Pointwise Euclidean magnitudes |D^alpha u| for every alpha with |alpha| in [lo, hi].
std::vector<std::vector<double>> derivative_magnitudes(std::span<const ScalarField> comps, int lo,
                                                       int hi, const SpectralTransform* tr) {
  std::vector<std::vector<double>> out;
  const std::size_t n = comps[0].size();
  for (int order = lo; order <= hi; ++order) {
    for (const auto& alpha : multi_indices(order)) {
      std::vector<double> mag(n, 0.0);
      for (const auto& c : comps) {
        const std::vector<double>* vals = &c.values;
        ScalarField d;
        if (!alpha.empty()) {
          if (tr == nullptr || !c.spectral)
            throw std::invalid_argument("derivative norms require spectral coefficients");
          d = c;
          for (int ax : alpha) d = derivative(*tr, d, ax);
          vals = &d.values;
        }
        for (std::size_t i = 0; i < n; ++i) mag[i] += (*vals)[i] * (*vals)[i];
      }
      for (auto& m : mag) m = std::sqrt(m);
      out.push_back(std::move(mag));
    }
  }
  return out;
}

double lp_of(const std::vector<std::vector<double>>& mags, const std::vector<double>& weight, double p,
             double cell) {
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& m : mags)
      for (std::size_t i = 0; i < m.size(); ++i) mx = std::max(mx, m[i] * weight[i]);
    return mx;
  }
  double s = 0.0;
  for (const auto& m : mags)
    for (std::size_t i = 0; i < m.size(); ++i) s += std::pow(m[i] * weight[i], p);
  return std::pow(s * cell, 1.0 / p);
}

}  // namespace

double norm(std::span<const ScalarField> comps, const NormSpec& spec, const SpectralTransform* tr) {
  if (comps.empty()) throw std::invalid_argument("norm of empty field");
  for (const auto& c : comps) c.check();
  const QuadratureGrid& grid = *comps[0].grid;
  const std::size_t n = grid.size();
  std::vector<double> unit(n, 1.0);

  switch (spec.family) {
    case NormSpec::Family::Lp:
      check_exponent(spec.p, "p");
      return lp_of(derivative_magnitudes(comps, 0, 0, tr), unit, spec.p, grid.weight());
    case NormSpec::Family::Sobolev:
      check_exponent(spec.p, "p");
      return lp_of(derivative_magnitudes(comps, 0, spec.k, tr), unit, spec.p, grid.weight());
    case NormSpec::Family::WeightedLp:
    case NormSpec::Family::WeightedLpK: {
      check_exponent(spec.p, "p");
      if (!(spec.mu > 0.0 && spec.mu < 1.0))
        throw std::invalid_argument(fmt::format("weighted norms need mu in (0,1), got {}", spec.mu));
      // Weight applied to |u| so that |u w|^p = |u|^p eta^{p mu}.
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double x3 = grid.coord(2, grid.ijk(i)[2]);
        w[i] = std::pow(dist_to_caps(x3, grid.spec()), spec.mu);
      }
      const int order = spec.family == NormSpec::Family::WeightedLp ? 0 : spec.k;
      return lp_of(derivative_magnitudes(comps, order, order, tr), w, spec.p, grid.weight());
    }
    case NormSpec::Family::Aniso: {
      check_exponent(spec.p1, "p1");
      check_exponent(spec.p2, "p2");
      const auto mags = derivative_magnitudes(comps, 0, spec.k, tr);
      const int n3 = grid.n(2);
      std::vector<double> plane(n3, 0.0);
      for (const auto& m : mags)
        for (std::size_t i = 0; i < n; ++i) {
          const int k = grid.ijk(i)[2];
          if (std::isinf(spec.p1))
            plane[k] = std::max(plane[k], m[i]);
          else
            plane[k] += std::pow(m[i], spec.p1);
        }
      const double area_cell = grid.axis_weight(0) * grid.axis_weight(1);
      if (!std::isinf(spec.p1))
        for (auto& v : plane) v = std::pow(v * area_cell, 1.0 / spec.p1);
      if (std::isinf(spec.p2)) return *std::max_element(plane.begin(), plane.end());
      double s = 0.0;
      for (double v : plane) s += std::pow(v, spec.p2);
      return std::pow(s * grid.axis_weight(2), 1.0 / spec.p2);
    }
  }
  throw std::logic_error("unknown norm family");
}

double norm(const ScalarField& f, const NormSpec& spec, const SpectralTransform* tr) {
  return norm(std::span<const ScalarField>(&f, 1), spec, tr);
}

double norm(const VectorField& f, const NormSpec& spec, const SpectralTransform* tr) {
  return norm(std::span<const ScalarField>(f.comp.data(), 3), spec, tr);
}

double trapezoid(std::span<const double> values, std::span<const double> t_grid) {
  if (values.size() != t_grid.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i)
    s += 0.5 * (values[i] + values[i - 1]) * (t_grid[i] - t_grid[i - 1]);
  return s;
}

double energy_norm(std::span<const NormSample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("energy norm needs at least 2 time samples");
  double sup = 0.0;
  double integral = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sup = std::max(sup, samples[i].sup_part);
    if (i > 0)
      integral += 0.5 * (samples[i].int_part_sq + samples[i - 1].int_part_sq) *
                  (samples[i].t - samples[i - 1].t);
  }
  return sup + std::sqrt(std::max(0.0, integral));
}

namespace {

double grad_sq(const ScalarField& f, const SpectralTransform& tr) {
  const double g = norm(f, NormSpec::Sobolev(1, 2.0), &tr);
  const double l = norm(f, NormSpec::Lp(2.0));
  return g * g - l * l;
}

}  // namespace

double energy_norm_V(std::span<const ScalarField> history, std::span<const double> t_grid,
                     const SpectralTransform& tr) {
  if (history.empty()) throw std::invalid_argument("energy norm of empty history");
  if (history.size() != t_grid.size()) throw std::invalid_argument("history/time size mismatch");
  std::vector<NormSample> s;
  for (std::size_t i = 0; i < history.size(); ++i)
    s.push_back({t_grid[i], norm(history[i], NormSpec::Lp(2.0)), std::max(0.0, grad_sq(history[i], tr))});
  return energy_norm(s);
}

double energy_norm_V1(std::span<const ScalarField> history, std::span<const double> t_grid,
                      const SpectralTransform& tr) {
  if (history.empty()) throw std::invalid_argument("energy norm of empty history");
  if (history.size() != t_grid.size()) throw std::invalid_argument("history/time size mismatch");
  std::vector<NormSample> s;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double h1 = norm(history[i], NormSpec::Sobolev(1, 2.0), &tr);
    const double h2 = norm(history[i], NormSpec::Sobolev(2, 2.0), &tr);
    const double l2 = norm(history[i], NormSpec::Lp(2.0));
    s.push_back({t_grid[i], h1, std::max(0.0, h2 * h2 - l2 * l2)});
  }
  return energy_norm(s);
}

double space_time_norm(std::span<const double> spatial_norms, std::span<const double> t_grid, double q) {
  check_exponent(q, "q");
  if (spatial_norms.empty()) throw std::invalid_argument("space-time norm of empty history");
  if (std::isinf(q)) return *std::max_element(spatial_norms.begin(), spatial_norms.end());
  std::vector<double> pw(spatial_norms.size());
  for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = std::pow(spatial_norms[i], q);
  return std::pow(trapezoid(pw, t_grid), 1.0 / q);
}

}  // namespace hopfflow
