#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hopfflow/basis.hpp"
#include "hopfflow/domain.hpp"
#include "hopfflow/fields.hpp"
#include "hopfflow/hopf.hpp"
#include "hopfflow/poisson.hpp"
#include "hopfflow/scenario.hpp"

namespace hopfflow {

/// Galerkin coefficients: w = sum c_i psi_i, theta = sum d_i phi_i.
struct State {
  double t = 0.0;
  Eigen::VectorXd c;
  Eigen::VectorXd d;
};

/// Raised when the integration produces non-finite values; carries the last
/// finite state.
struct NumericalAbort : std::runtime_error {
  NumericalAbort(const std::string& what, State last) : std::runtime_error(what), last_valid(std::move(last)) {}
  State last_valid;
};

/// Everything time-independent: domain, extension, bases, assembled forms and
/// the grid samples used by the pseudo-spectral right-hand side. The extension
/// enters at time t through the amplitude A(t) and its rate only.
class Problem {
 public:
  explicit Problem(const ScenarioConfig& cfg);
  /// Same geometry and bases with the flux and force replaced (used for the
  /// free-decay calibration run).
  Problem(const ScenarioConfig& cfg, bool drop_data);
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  const ScenarioConfig& config() const { return cfg_; }
  const Domain& domain() const { return domain_; }
  const VelocityBasis& velocity_basis() const { return vb_; }
  const TemperatureBasis& temperature_basis() const { return tb_; }
  const AssembledForms& forms() const { return forms_; }
  bool has_flux() const { return ext_ != nullptr; }
  bool has_force() const { return force_active_; }
  const HopfParams& hopf() const { return hopf_; }
  const ExtendedFlux* flux() const { return flux_.get(); }
  const HopfExtension* extension() const { return ext_.get(); }
  const FluxProfile& profile() const { return profile_; }
  /// sup_t ||d~||_{W^1_{3,inf}} over the run horizon.
  double flux_norm() const { return flux_norm_; }

  double amp(double t) const { return ext_ ? ext_->amp(t) : 0.0; }
  double amp_rate(double t) const { return ext_ ? ext_->amp_rate(t) : 0.0; }

  std::size_t mv() const { return vb_.size(); }
  std::size_t mt() const { return tb_.size(); }
  std::size_t nodes() const { return domain_.grid.size(); }

  /// Explicit (nonlinear, boundary, forcing) parts of the right-hand sides.
  Eigen::VectorXd explicit_velocity(double t, const Eigen::VectorXd& c, const Eigen::VectorXd& d) const;
  Eigen::VectorXd explicit_temperature(double t, const Eigen::VectorXd& c, const Eigen::VectorXd& d) const;
  /// Full right-hand sides c' and d'.
  Eigen::VectorXd rhs_velocity(const State& s) const;
  Eigen::VectorXd rhs_temperature(const State& s) const;

  /// Nodal samples of w, grad w (row 3*c+b), theta, grad theta.
  Eigen::VectorXd w_nodes(const Eigen::VectorXd& c) const { return psi_val_ * c; }
  Eigen::VectorXd w_grad_nodes(const Eigen::VectorXd& c) const { return psi_grad_ * c; }
  Eigen::VectorXd theta_nodes(const Eigen::VectorXd& d) const { return phi_val_ * d; }
  Eigen::VectorXd theta_grad_nodes(const Eigen::VectorXd& d) const { return phi_grad_ * d; }

  /// Initial state: w(0) from init.w_amp on the lowest modes, theta(0) the
  /// projection of the configured initial temperature.
  State initial_state() const;

  /// v = w + delta and theta on the grid.
  std::pair<VectorField, ScalarField> reconstruct(const State& s) const;

  /// |int_{S2(a)} v.n - int d2| / max(1, int d2).
  double flux_residual(const State& s) const;
  /// int_{S2(-a)} d1 theta.
  double inflow_heat(const State& s) const;
  /// int theta.
  double theta_integral(const State& s) const;

  /// ||omega(theta) f||_{L_{6/5}}.
  double forcing_norm(const Eigen::VectorXd& d) const;

  /// Norm pieces of delta at unit amplitude and its cross terms with the basis.
  double delta_l2_sq() const { return delta_l2_sq_; }
  double delta_grad_sq() const { return delta_grad_sq_; }
  const Eigen::VectorXd& psi_delta() const { return psi_delta_; }
  const Eigen::VectorXd& psi_delta_grad() const { return psi_delta_grad_; }

  /// Largest explicit step suggested by the advective and coupling terms.
  double stability_dt() const { return stability_dt_; }

  /// Precomputed pieces of the explicit velocity term at unit amplitude.
  const Eigen::VectorXd& boundary_unit() const { return b_unit_; }
  const Eigen::VectorXd& viscous_unit() const { return fvisc_unit_; }
  const Eigen::MatrixXd& transport_delta() const { return h_delta_; }

 private:
  void build(bool drop_data);
  void precompute_extension_terms();

  ScenarioConfig cfg_;
  Domain domain_;
  FluxProfile profile_;
  std::unique_ptr<ExtendedFlux> flux_;
  HopfParams hopf_;
  double flux_norm_ = 0.0;
  std::unique_ptr<HopfExtension> ext_;
  VelocityBasis vb_;
  TemperatureBasis tb_;
  AssembledForms forms_;

  Eigen::MatrixXd psi_val_, psi_grad_, phi_val_, phi_grad_;
  Eigen::VectorXd force_;
  bool force_active_ = false;
  std::optional<Eigen::VectorXd> omega_f_const_;

  Eigen::VectorXd b_unit_, fvisc_unit_, ft_unit_, fnl_unit_;
  Eigen::MatrixXd h_delta_, t_delta_;
  double delta_l2_sq_ = 0.0, delta_grad_sq_ = 0.0;
  Eigen::VectorXd psi_delta_, psi_delta_grad_;
  Eigen::MatrixXd psi_upper_;  // normal velocity of each mode at upper cap nodes
  Eigen::VectorXd upper_weights_, upper_delta_n_, inflow_theta_;
  double stability_dt_ = 0.0;
};

/// Independent evaluation of both right-hand sides by direct nodal quadrature
/// of every term, with modes evaluated in closed form. Cost O(nodes m^2).
std::pair<Eigen::VectorXd, Eigen::VectorXd> oracle_rhs(const Problem& p, const State& s);

/// IMEX ARS(2,2,2): linear dissipative terms implicit, the rest explicit.
class Stepper {
 public:
  Stepper(const Problem& p, double dt);
  State step(const State& s) const;
  double dt() const { return dt_; }

 private:
  const Problem* p_;
  double dt_;
  double g_, d_;
  Eigen::MatrixXd Kv_, Kt_;
  Eigen::LLT<Eigen::MatrixXd> Lv_, Lt_;
};

struct Trajectory {
  std::vector<State> samples;
  std::vector<std::size_t> window_start;  // sample index at t = kT, k = 0..windows
  std::vector<std::string> warnings;
};

/// Integrates `windows` windows of length T; the state at kT seeds window k.
Trajectory run_windows(const Problem& p, const State& init, double T, int windows, double dt, int sample_every);

}  // namespace hopfflow
