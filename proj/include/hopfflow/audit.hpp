#pragma once

#include <string>
#include <vector>

#include "hopfflow/solver.hpp"

namespace hopfflow {

/// Monitored quantities at one recorded time. X and Y exclude the constant
/// temperature mode (it is not dissipated); theta_l2 is the full norm.
struct LedgerSample {
  double t = 0.0;
  double X = 0.0;
  double Y = 0.0;
  double F = 0.0;
  double dXdt = 0.0;
  double slip = 0.0;  // gamma sum ||w . tau||^2 on S1
  double w_l2 = 0.0;
  double theta_l2 = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double flux_residual = 0.0;
  double forcing_sq = 0.0;  // ||omega(theta) f||^2_{L6/5}
  double theta_int = 0.0;
  double inflow_heat = 0.0;
};

struct Calibration {
  double c1 = 1.0;
  double c2 = 0.0;
  double M = 0.0;
  double ratio_min = 0.0;      // min over the decay run of (-dX/dt - slip) / Y
  double rayleigh_ref = 0.0;   // min generalized eigenvalue of K_visc + K_fric against I + G_vel
};

struct Certificate {
  std::string name;
  std::string reference;  // inequality the numbers belong to
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  bool advisory = false;  // reported only; never fails a strict run
  std::string detail;

  double margin() const { return rhs - lhs; }
};

struct AuditReport {
  std::vector<LedgerSample> samples;
  std::vector<std::size_t> window_start;
  Calibration cal;
  double A1 = 0.0;
  double A2 = 0.0;
  std::vector<double> window_F;
  std::vector<Certificate> certificates;

  bool all_pass() const;
  const Certificate* find(const std::string& name) const;
};

/// Default monotone weight psi(s) = (1 + s^2) s^4 e^s.
double psi_weight(double s);

/// c [ ||omega f||^2_{L6/5} + psi(||d~||_{W1_{3,inf}}) (sum ||d_i||^2_{W1_3(S2)} + sum ||d_it||^2_{W1_{6/5}(S2)}) ].
double budget_F(const Problem& p, const State& s, double c_budget);

double rayleigh_reference(const Problem& p);

/// X, Y for given constants.
double energy_X(const Problem& p, const State& s, double c1);
double energy_Y(const Problem& p, const State& s, double c1);

/// Free-decay calibration of c2 on the same geometry and bases (f = 0, d = 0),
/// started from a broadband probe state. c1 = max(4 M / kappa, c1_floor).
Calibration calibrate(const ScenarioConfig& cfg, double M);

/// Discrete time derivative: centered inside windows, one-sided at window ends.
std::vector<double> window_derivative(const std::vector<double>& v, const std::vector<double>& t,
                                      const std::vector<std::size_t>& window_start);

/// Builds the ledger and every certificate for a finished run.
AuditReport audit_run(const Problem& p, const Trajectory& tr);
/// Same with a given calibration (skips the decay run).
AuditReport audit_run(const Problem& p, const Trajectory& tr, const Calibration& cal);

/// Static certificates that need no time integration.
/// mu > 2/3, needed for the weighted layer integral to converge.
Certificate weight_certificate(double mu);

std::vector<Certificate> static_certificates(const Problem& p);

}  // namespace hopfflow
