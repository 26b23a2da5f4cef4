#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hopfflow/domain.hpp"

namespace hopfflow {

/// One axis factor cos(kappa s) or sin(kappa s), kappa = pi k / L, s measured
/// from the low end of the axis.
struct TrigFactor {
  bool sine = false;
  int k = 0;
  double length = 1.0;

  double kappa() const;
  double value(double s) const;
};

/// coef * prod_a factor_a(s_a).
struct SepTerm {
  double coef = 0.0;
  std::array<TrigFactor, 3> f{};

  double value(const Vec3& x, const DomainSpec& spec) const;
  /// Partial derivative along `axis` (still a single term).
  SepTerm derivative(int axis) const;
};

/// int_0^L of the product of two factors, closed form.
double integrate_1d(const TrigFactor& a, const TrigFactor& b);
/// Volume integral of the product of two terms.
double integrate_product(const SepTerm& a, const SepTerm& b);
/// Integral of the product over the face where axis `axis` sits at its low
/// (high = false) or high end.
double face_integral(const SepTerm& a, const SepTerm& b, int axis, bool high);

/// psi = (A1 s1 c2 c3, A2 c1 s2 c3, A3 c1 c2 s3) with A . kappa = 0; divergence
/// free with zero normal trace on every face.
struct VelocityMode {
  std::array<int, 3> k{};
  Vec3 amp{};        // includes the L2 normalization
  int polarization = 0;
  double rayleigh = 0.0;

  SepTerm component(int c, const DomainSpec& spec) const;
  Vec3 value(const Vec3& x, const DomainSpec& spec) const;
  /// g[3*c+b] = d psi_c / dx_b.
  std::array<double, 9> grad(const Vec3& x, const DomainSpec& spec) const;
};

struct TemperatureMode {
  std::array<int, 3> k{};
  double amp = 1.0;
  double eigenvalue = 0.0;  // Neumann Laplacian eigenvalue

  SepTerm term(const DomainSpec& spec) const;
  double value(const Vec3& x, const DomainSpec& spec) const;
  Vec3 grad(const Vec3& x, const DomainSpec& spec) const;
};

/// Largest resolvable wavenumber per axis so that triple products integrate
/// exactly on the midpoint grid.
std::array<int, 3> dealiased_band(const DomainSpec& spec);

struct VelocityBasis {
  DomainSpec spec;
  std::vector<VelocityMode> modes;
  double gram_error = 0.0;  // max |<psi_i, psi_j> - delta_ij| on the grid

  std::size_t size() const { return modes.size(); }
};

struct TemperatureBasis {
  DomainSpec spec;
  std::vector<TemperatureMode> modes;
  double gram_error = 0.0;

  std::size_t size() const { return modes.size(); }
};

struct SlipOptions {
  double nu = 1.0;
  double gamma = 1.0;
};

/// First m modes by ascending Rayleigh quotient of the viscous plus friction
/// form, ties broken lexicographically by wavevector then polarization.
/// Throws std::invalid_argument when m is not available inside the band.
VelocityBasis build_velocity_basis(const DomainSpec& spec, int m, const SlipOptions& opt);
TemperatureBasis build_temperature_basis(const DomainSpec& spec, int m);

/// Time-independent matrices. K_visc = (nu/2) int D:D, K_fric = gamma sum int_{S1}
/// (psi . tau)(psi . tau), K_theta = kappa int grad . grad; G_* are H1 seminorm
/// Gram matrices.
struct AssembledForms {
  Eigen::MatrixXd K_visc, K_fric, K_theta;
  Eigen::MatrixXd G_vel, G_temp;
};

AssembledForms assemble_forms(const VelocityBasis& vb, const TemperatureBasis& tb, double nu, double gamma, double kappa);

/// Entry (i,j) of the viscous and friction forms evaluated directly.
double viscous_entry(const VelocityMode& a, const VelocityMode& b, const DomainSpec& spec, double nu);
double friction_entry(const VelocityMode& a, const VelocityMode& b, const DomainSpec& spec, double gamma);

/// Human-readable listing of both bases.
std::string basis_manifest(const VelocityBasis& vb, const TemperatureBasis& tb);

}  // namespace hopfflow
