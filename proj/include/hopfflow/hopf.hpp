#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hopfflow/domain.hpp"
#include "hopfflow/fields.hpp"

namespace hopfflow {

/// Logarithmic cutoff parameters. The cutoff equals 1 on [0, r], decays
/// like -eps*ln(sigma/rho) on (r, rho] and vanishes beyond rho, with
/// r = rho * exp(-1/eps).
struct HopfParams {
  double eps = 0.5;
  double rho = 0.1;
  double c_cal = 1.0;

  double r() const;
};

void validate(const HopfParams& params);

double hopf_eta(double sigma, const HopfParams& params);

struct EtaPrime {
  double value = 0.0;
  bool at_kink = false;  // sigma coincided with r or rho; value taken from the log branch
};

EtaPrime hopf_eta_prime(double sigma, const HopfParams& params);

/// eps = nu / (8 c ||d~||), rho = eps^6. Throws std::domain_error when rho >= 1
/// or the norm is not positive.
HopfParams select_params(double nu, double d_tilde_norm, double c_cal);

/// Left side c (eps + rho^{1/6}) ||d~|| of the smallness condition; the
/// condition is satisfied when this is <= nu/4.
double smallness_lhs(const HopfParams& params, double d_tilde_norm);

// ---------------------------------------------------------------------------
// Flux data

/// Inflow d1 >= 0 on the lower cap and outflow d2 >= 0 on the upper cap,
/// separable as amplitude(t) * shape_i(x1, x2).
struct FluxProfile {
  std::string name = "none";
  std::function<double(double, double)> shape1;
  std::function<double(double, double)> shape2;
  std::function<double(double)> amplitude;
  /// Analytic amplitude rate; when empty a centered difference with `fd_dt` is used.
  std::function<double(double)> amplitude_rate;
  double fd_dt = 1e-3;

  double amp(double t) const { return amplitude ? amplitude(t) : 0.0; }
  double amp_rate(double t) const;
  double d1(double x1, double x2, double t) const { return amp(t) * shape1(x1, x2); }
  double d2(double x1, double x2, double t) const { return amp(t) * shape2(x1, x2); }
  bool is_zero() const;
};

struct FluxOptions {
  double amplitude = 1.0;
  double pulse = 0.5;    // relative pulse depth, must stay below 1 so the flux never vanishes
  double period = 1.0;
  double outflow_scale = 1.0;  // multiplies d2; anything but 1 breaks compatibility on purpose
};

/// Built-in profiles: "none", "constant", "parabolic-cap", "pulsed".
FluxProfile make_flux_profile(const std::string& name, const DomainSpec& spec, const FluxOptions& opt);

/// |int d1 - int d2| / max(1, int d1) over the caps at time t.
double check_compatibility(const FluxProfile& profile, const Domain& domain, double t);

/// Constant-in-x3 extension of the cap data. The cap shapes are represented
/// by their cosine interpolant on the cap nodes, so the trace reproduces the
/// sampled data exactly and the extension is smooth in (x1, x2).
class ExtendedFlux {
 public:
  ExtendedFlux(const FluxProfile& profile, const DomainSpec& spec);

  const FluxProfile& profile() const { return profile_; }
  const DomainSpec& spec() const { return spec_; }

  /// Cosine coefficient of shape i (0: inflow, 1: outflow) for mode (k1, k2).
  double coeff(int i, int k1, int k2) const { return coeffs_[i][static_cast<std::size_t>(k1) * spec_.N2 + k2]; }
  double mean(int i) const { return coeff(i, 0, 0); }

  /// Shape i and its gradient in (x1, x2) at an arbitrary cross-section point.
  double shape(int i, double x1, double x2) const;
  std::array<double, 2> shape_grad(int i, double x1, double x2) const;

  double value(int i, const Vec3& x, double t) const { return profile_.amp(t) * shape(i, x[0], x[1]); }

  /// ||d~||_{W^1_{3,inf}(Omega)} at time t, both components together.
  double w13inf_norm(double t) const;
  /// sup over t in [0, T] sampled at `samples` points.
  double w13inf_norm_sup(double T, int samples = 257) const;

  /// ||d_i||_{W^1_p(S2(a_i))} of the cap data at time t (p finite).
  double cap_sobolev_norm(int i, double p, double t) const;
  /// Same for the time derivative d_{i,t}.
  double cap_sobolev_norm_rate(int i, double p, double t) const;
  /// ||d_i||_{L_p(S2(a_i))}.
  double cap_lp_norm(int i, double p, double t) const;

 private:
  double shape_w1p(int i, double p) const;

  FluxProfile profile_;
  DomainSpec spec_;
  std::array<std::vector<double>, 2> coeffs_;
  std::vector<double> cx1_, cx2_;  // cap node coordinates
  std::array<std::vector<double>, 2> node_vals_, node_dx1_, node_dx2_;
};

/// b = alpha e3 with alpha = sum_i d~_i eta(sigma_i), sigma_1 = x3 + a,
/// sigma_2 = a - x3. Requires rho < a.
class ExtensionB {
 public:
  ExtensionB(const ExtendedFlux& flux, const HopfParams& params);

  const HopfParams& params() const { return params_; }
  const ExtendedFlux& flux() const { return *flux_; }

  double alpha(const Vec3& x, double t) const;
  /// div b = d alpha / dx3 = d~_1 eta'(sigma_1) - d~_2 eta'(sigma_2).
  double div_b(const Vec3& x, double t) const;
  Vec3 b(const Vec3& x, double t) const { return {0.0, 0.0, alpha(x, t)}; }

  ScalarField sample_alpha(const QuadratureGrid& grid, double t) const;
  ScalarField sample_div_b(const QuadratureGrid& grid, double t) const;

  bool in_support(const Vec3& x) const;

 private:
  const ExtendedFlux* flux_;
  HopfParams params_;
};

}  // namespace hopfflow
