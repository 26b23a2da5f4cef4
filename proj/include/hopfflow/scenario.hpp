#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopfflow/domain.hpp"
#include "hopfflow/hopf.hpp"

namespace hopfflow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// omega(theta): constant w0, linear w0 + w1 theta, or bounded_smooth
/// w0 + w1 tanh((theta - ref) / width).
struct OmegaSpec {
  enum class Kind { Constant, Linear, BoundedSmooth };
  Kind kind = Kind::Constant;
  double w0 = 1.0;
  double w1 = 0.0;
  double ref = 1.5;
  double width = 1.0;

  double operator()(double theta) const;
};

/// Static body force: zero, vertical f0 e3, or a smooth cellular field.
struct ForceSpec {
  enum class Kind { Zero, Vertical, Cellular };
  Kind kind = Kind::Zero;
  double amp = 0.0;

  Vec3 operator()(const Vec3& x, const DomainSpec& spec) const;
  bool is_zero() const { return kind == Kind::Zero || amp == 0.0; }
};

/// Initial temperature between the bounds lo and hi: constant, layered
/// (cosine in x3) or a tanh front across x3 = 0.
struct Theta0Spec {
  enum class Kind { Constant, Layered, Front };
  Kind kind = Kind::Constant;
  double value = 1.0;
  double front_width = 0.1;

  double operator()(const Vec3& x, const DomainSpec& spec, double lo, double hi) const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  DomainSpec domain;

  double nu = 1.0;
  double kappa = 1.0;
  double gamma = 1.0;
  bool b2_include_nu = false;
  OmegaSpec omega;
  ForceSpec force;

  std::string flux_profile = "none";
  FluxOptions flux;

  bool hopf_auto = true;
  double c_cal = 1.0;
  double eps = 0.5;
  double rho = 0.1;

  int m_velocity = 16;
  int m_temperature = 16;
  double dt = 1e-3;
  double T = 1.0;
  int windows = 1;
  int sample_every = 1;

  Theta0Spec theta0;
  double w_amp = 0.0;

  double theta_lower = 1.0;
  double theta_upper = 2.0;
  double mu = 0.8;
  double c_budget = 1.0;
  double c1_floor = 1.0;
  double overshoot_tol = 0.01;
  double c_rec = 1.0;
  double calib_T = 1.0;
  double compat_tol = 1e-12;

  int snapshots = 0;  // snapshot cadence in recorded samples, 0 disables
};

/// Throws ConfigError naming the offending key when values are inconsistent.
void validate(const ScenarioConfig& cfg);

/// Parses `section.key = value` lines; '#' starts a comment. Errors carry
/// the line number.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// Sets one key as if it appeared in the file.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Sorted list of recognized keys.
std::vector<std::string> scenario_keys();

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace hopfflow
