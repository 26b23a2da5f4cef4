#pragma once

#include <array>
#include <vector>

#include "hopfflow/domain.hpp"
#include "hopfflow/fields.hpp"
#include "hopfflow/hopf.hpp"

namespace hopfflow {

/// Zero-mean potential with homogeneous Neumann data. hessian[3*i+j] holds
/// d^2 phi / dx_i dx_j.
struct NeumannSolution {
  ScalarField phi;
  VectorField grad_phi;
  std::array<ScalarField, 9> hessian;
  double residual = 0.0;  // ||Laplacian(phi) + div b||_{L2} on the nodes
};

/// Thrown when the data violate the Neumann solvability condition.
struct SolvabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// All-cosine spectral solve of Laplacian(phi) = -div_b. The data mean must
/// satisfy |int div_b| <= tol * max(||div_b||_{L1}, tiny).
NeumannSolution solve_neumann(const SpectralTransform& tr, const ScalarField& div_b, double tol = 1e-10);

/// Solution of h'' - lambda^2 h = -eta'(z) on (0, ell) with h'(0) = h'(ell) = 0,
/// where eta' is the cutoff derivative. Closed form via exponential integrals.
struct LayerProfile {
  double h = 0.0;
  double hp = 0.0;
  double hpp = 0.0;
};
LayerProfile layer_profile(double lambda, double z, double ell, const HopfParams& params);

/// Sampled unit-amplitude extension delta = b + grad(phi) at a node set.
/// grad[3*i+j] = d delta_i / dx_j; b has only the vertical component b3.
struct ExtensionSamples {
  std::vector<Vec3> points;
  std::array<std::vector<double>, 3> delta;
  std::array<std::vector<double>, 9> grad;
  std::vector<double> b3;
  std::array<std::vector<double>, 3> grad_b3;
  std::vector<double> phi;

  std::size_t size() const { return points.size(); }
};

/// Divergence-free extension of the flux data. Each cross-section cosine
/// mode of the cap data gets an exact x3 profile, so div(delta) vanishes up to
/// rounding and delta . n equals the cap data on the cap nodes. The field at
/// time t equals amplitude(t) times the unit samples.
struct Lemma22Ratio {
  double hessian = 0.0;  // ||grad^2 phi||_{L_{p,mu}}
  double div_b = 0.0;    // ||div b||_{L_{p,mu}}
  double ratio = 0.0;
  int nodes_z = 0;
};

class HopfExtension {
 public:
  HopfExtension(const ExtendedFlux& flux, const HopfParams& params, const Domain& domain);

  const HopfParams& params() const { return params_; }
  const ExtendedFlux& flux() const { return *flux_; }
  double amp(double t) const { return flux_->profile().amp(t); }
  double amp_rate(double t) const { return flux_->profile().amp_rate(t); }

  const ExtensionSamples& volume() const { return volume_; }
  const ExtensionSamples& patch(std::size_t p) const { return patches_[p]; }

  /// Unit-amplitude evaluation at arbitrary points.
  ExtensionSamples evaluate(const std::vector<Vec3>& points) const;

  /// Potential and derivatives on the grid at time t as a Neumann solution.
  NeumannSolution solution(const QuadratureGrid& grid, double t) const;

  /// Weighted Lemma 2.2 ratio on a layer-graded quadrature: Gauss panels
  /// uniform in log(sigma) across (r, rho) and out to the mid-plane, cap
  /// midpoint nodes in x'. Resolves layers far thinner than the grid.
  Lemma22Ratio lemma22_ratio(double p, double mu) const;

  /// ||div delta||_{L2} / ||b||_{H1} at unit amplitude (0 when b = 0).
  double divergence_ratio(const QuadratureGrid& grid) const;
  /// max over cap nodes |delta . n - d_i| / max(1, max d_i) at unit amplitude.
  double trace_error(const Domain& domain) const;

 private:
  struct Mode {
    int k1 = 0, k2 = 0;
    double kap1 = 0.0, kap2 = 0.0, lambda = 0.0, D1 = 0.0, D2 = 0.0;
  };

  const ExtendedFlux* flux_;
  HopfParams params_;
  double ell_ = 2.0;
  std::vector<Mode> modes_;
  ExtensionSamples volume_;
  std::vector<ExtensionSamples> patches_;
};

/// ||grad^2 phi||_{L_{p,mu}} / ||div b||_{L_{p,mu}} with the Frobenius
/// magnitude of the Hessian. Requires p >= 2 and mu in (0, 1).
double certify_lemma22(const ScalarField& div_b, const NeumannSolution& sol, double p, double mu);

struct Certificate319 {
  double lhs = 0.0;    // ||div b||_{L_{3,mu}}
  double rhs = 0.0;    // eps rho^{mu-2/3} sum sup |d~_i|_{3,S2}, unit constant
  double ratio = 0.0;  // lhs / rhs, 0 when both vanish
};

/// The left side is integrated exactly in x3 and with cap quadrature in x'.
/// Throws std::domain_error for mu <= 2/3 or mu >= 1.
Certificate319 certify_319(const ExtendedFlux& flux, const HopfParams& params, double mu, double t);

}  // namespace hopfflow
