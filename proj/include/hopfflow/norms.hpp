#pragma once

#include <limits>
#include <span>
#include <vector>

#include "hopfflow/fields.hpp"

namespace hopfflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Norm families on the box. Weighted families use the cap distance
/// dist_to_caps(x3) raised to p*mu; anisotropic families take the
/// cross-section norm first and the x3 norm second.
struct NormSpec {
  enum class Family { Lp, Sobolev, WeightedLp, WeightedLpK, Aniso };

  Family family = Family::Lp;
  int k = 0;
  double p = 2.0;
  double p1 = 2.0;
  double p2 = 2.0;
  double mu = 0.5;

  static NormSpec Lp(double p) { return {Family::Lp, 0, p, p, p, 0.0}; }
  static NormSpec Sobolev(int k, double p) { return {Family::Sobolev, k, p, p, p, 0.0}; }
  static NormSpec WeightedLp(double p, double mu) { return {Family::WeightedLp, 0, p, p, p, mu}; }
  static NormSpec WeightedLpK(int k, double p, double mu) { return {Family::WeightedLpK, k, p, p, p, mu}; }
  static NormSpec Aniso(int k, double p1, double p2) { return {Family::Aniso, k, p1, p1, p2, 0.0}; }

  bool needs_derivatives() const { return k > 0; }
};

/// Norm of a (possibly vector-valued) field given by its components.
/// Derivative families need spectral data on every component and a transform.
double norm(std::span<const ScalarField> comps, const NormSpec& spec,
            const SpectralTransform* tr = nullptr);
double norm(const ScalarField& f, const NormSpec& spec, const SpectralTransform* tr = nullptr);
double norm(const VectorField& f, const NormSpec& spec, const SpectralTransform* tr = nullptr);

/// One time sample of a space-time norm: `sup_part` enters through the time
/// supremum, `int_part_sq` through the time integral.
struct NormSample {
  double t = 0.0;
  double sup_part = 0.0;
  double int_part_sq = 0.0;
};

/// sup_t sup_part + (int int_part_sq dt)^{1/2}, trapezoidal in time.
double energy_norm(std::span<const NormSample> samples);

/// ||u||_V = ess sup ||u||_2 + (int ||grad u||_2^2)^{1/2}. Needs >= 2 samples.
double energy_norm_V(std::span<const ScalarField> history, std::span<const double> t_grid,
                     const SpectralTransform& tr);
/// V^1_2 variant with H^1 in place of L_2.
double energy_norm_V1(std::span<const ScalarField> history, std::span<const double> t_grid,
                      const SpectralTransform& tr);

/// |u|_{p,q,Q^t} = (int_0^t |u|_p^q dt)^{1/q} from samples of |u(t)|_p.
double space_time_norm(std::span<const double> spatial_norms, std::span<const double> t_grid, double q);

/// Trapezoidal integral of samples.
double trapezoid(std::span<const double> values, std::span<const double> t_grid);

}  // namespace hopfflow
