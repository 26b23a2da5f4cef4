#include "hopfflow/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace hopfflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, v));
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

Setter dbl(double ScenarioConfig::*f) {
  return [f](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*f = to_double(k, v); };
}
Setter integer(int ScenarioConfig::*f) {
  return [f](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*f = to_int(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["name"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.name = v; };
    t["domain.L1"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.domain.L1 = to_double(k, v); };
    t["domain.L2"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.domain.L2 = to_double(k, v); };
    t["domain.a"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.domain.a = to_double(k, v); };
    t["domain.N1"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.domain.N1 = to_int(k, v); };
    t["domain.N2"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.domain.N2 = to_int(k, v); };
    t["domain.N3"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.domain.N3 = to_int(k, v); };
    t["physics.nu"] = dbl(&ScenarioConfig::nu);
    t["physics.kappa"] = dbl(&ScenarioConfig::kappa);
    t["physics.gamma"] = dbl(&ScenarioConfig::gamma);
    t["physics.b2_include_nu"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.b2_include_nu = to_bool(k, v); };
    t["physics.omega"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "constant") c.omega.kind = OmegaSpec::Kind::Constant;
      else if (v == "linear") c.omega.kind = OmegaSpec::Kind::Linear;
      else if (v == "bounded_smooth") c.omega.kind = OmegaSpec::Kind::BoundedSmooth;
      else throw ConfigError(fmt::format("{}: unknown kind '{}'", k, v));
    };
    t["physics.omega0"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.omega.w0 = to_double(k, v); };
    t["physics.omega1"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.omega.w1 = to_double(k, v); };
    t["physics.omega_ref"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.omega.ref = to_double(k, v); };
    t["physics.omega_width"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.omega.width = to_double(k, v); };
    t["physics.force"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "zero") c.force.kind = ForceSpec::Kind::Zero;
      else if (v == "vertical") c.force.kind = ForceSpec::Kind::Vertical;
      else if (v == "cellular") c.force.kind = ForceSpec::Kind::Cellular;
      else throw ConfigError(fmt::format("{}: unknown kind '{}'", k, v));
    };
    t["physics.force_amp"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.force.amp = to_double(k, v); };
    t["flux.profile"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      static const std::set<std::string> known{"none", "constant", "parabolic-cap", "pulsed"};
      if (!known.count(v)) throw ConfigError(fmt::format("{}: unknown profile '{}'", k, v));
      c.flux_profile = v;
    };
    t["flux.amplitude"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.flux.amplitude = to_double(k, v); };
    t["flux.pulse"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.flux.pulse = to_double(k, v); };
    t["flux.period"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.flux.period = to_double(k, v); };
    t["flux.outflow_scale"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.flux.outflow_scale = to_double(k, v); };
    t["hopf.mode"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "auto") c.hopf_auto = true;
      else if (v == "manual") c.hopf_auto = false;
      else throw ConfigError(fmt::format("{}: expected auto or manual, got '{}'", k, v));
    };
    t["hopf.c_cal"] = dbl(&ScenarioConfig::c_cal);
    t["hopf.eps"] = dbl(&ScenarioConfig::eps);
    t["hopf.rho"] = dbl(&ScenarioConfig::rho);
    t["galerkin.m_velocity"] = integer(&ScenarioConfig::m_velocity);
    t["galerkin.m_temperature"] = integer(&ScenarioConfig::m_temperature);
    t["galerkin.m"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.m_velocity = c.m_temperature = to_int(k, v);
    };
    t["galerkin.dt"] = dbl(&ScenarioConfig::dt);
    t["galerkin.T"] = dbl(&ScenarioConfig::T);
    t["galerkin.windows"] = integer(&ScenarioConfig::windows);
    t["galerkin.sample_every"] = integer(&ScenarioConfig::sample_every);
    t["init.theta"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "constant") c.theta0.kind = Theta0Spec::Kind::Constant;
      else if (v == "layered") c.theta0.kind = Theta0Spec::Kind::Layered;
      else if (v == "front") c.theta0.kind = Theta0Spec::Kind::Front;
      else throw ConfigError(fmt::format("{}: unknown kind '{}'", k, v));
    };
    t["init.theta_value"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.theta0.value = to_double(k, v); };
    t["init.front_width"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.theta0.front_width = to_double(k, v); };
    t["init.w_amp"] = dbl(&ScenarioConfig::w_amp);
    t["audit.theta_lower"] = dbl(&ScenarioConfig::theta_lower);
    t["audit.theta_upper"] = dbl(&ScenarioConfig::theta_upper);
    t["audit.mu"] = dbl(&ScenarioConfig::mu);
    t["audit.c_budget"] = dbl(&ScenarioConfig::c_budget);
    t["audit.c1_floor"] = dbl(&ScenarioConfig::c1_floor);
    t["audit.overshoot_tol"] = dbl(&ScenarioConfig::overshoot_tol);
    t["audit.c_rec"] = dbl(&ScenarioConfig::c_rec);
    t["audit.calib_T"] = dbl(&ScenarioConfig::calib_T);
    t["audit.compat_tol"] = dbl(&ScenarioConfig::compat_tol);
    t["output.snapshots"] = integer(&ScenarioConfig::snapshots);
    return t;
  }();
  return table;
}

}  // namespace

double OmegaSpec::operator()(double theta) const {
  switch (kind) {
    case Kind::Constant: return w0;
    case Kind::Linear: return w0 + w1 * theta;
    case Kind::BoundedSmooth: return w0 + w1 * std::tanh((theta - ref) / width);
  }
  return w0;
}

Vec3 ForceSpec::operator()(const Vec3& x, const DomainSpec& spec) const {
  switch (kind) {
    case Kind::Zero: return {0.0, 0.0, 0.0};
    case Kind::Vertical: return {0.0, 0.0, amp};
    case Kind::Cellular: {
      const double s1 = kPi * x[0] / spec.L1, s2 = kPi * x[1] / spec.L2, s3 = kPi * (x[2] + spec.a) / spec.height();
      return {amp * std::sin(s2) * std::cos(s3), amp * std::sin(s3) * std::cos(s1), amp * std::sin(s1) * std::cos(s2)};
    }
  }
  return {0.0, 0.0, 0.0};
}

double Theta0Spec::operator()(const Vec3& x, const DomainSpec& spec, double lo, double hi) const {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Layered: return mid + half * std::cos(kPi * (x[2] + spec.a) / spec.height());
    case Kind::Front: return mid + half * std::tanh(x[2] / front_width);
  }
  return value;
}

void validate(const ScenarioConfig& c) {
  try {
    validate(c.domain);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("domain: {}", e.what()));
  }
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("{} must be positive", key));
  };
  positive(c.nu, "physics.nu");
  positive(c.kappa, "physics.kappa");
  positive(c.gamma, "physics.gamma");
  positive(c.dt, "galerkin.dt");
  positive(c.T, "galerkin.T");
  positive(c.c_cal, "hopf.c_cal");
  positive(c.c_budget, "audit.c_budget");
  positive(c.c_rec, "audit.c_rec");
  positive(c.calib_T, "audit.calib_T");
  if (c.omega.kind == OmegaSpec::Kind::BoundedSmooth) positive(c.omega.width, "physics.omega_width");
  positive(c.theta0.front_width, "init.front_width");
  if (c.windows < 1) throw ConfigError("galerkin.windows must be >= 1");
  if (c.sample_every < 1) throw ConfigError("galerkin.sample_every must be >= 1");
  if (c.m_velocity < 1 || c.m_temperature < 1) throw ConfigError("galerkin mode counts must be >= 1");
  if (c.snapshots < 0) throw ConfigError("output.snapshots must be >= 0");
  if (!(c.theta_lower < c.theta_upper)) throw ConfigError("audit.theta_lower must be below audit.theta_upper");
  if (!(c.theta_lower > 0.0)) throw ConfigError("audit.theta_lower must be positive");
  if (c.T / c.dt < 1.0 - 1e-12) throw ConfigError("galerkin.dt must not exceed galerkin.T");
  const double steps = c.T / c.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) throw ConfigError("galerkin.T must be an integer multiple of galerkin.dt");
  if (c.flux_profile != "none") {
    if (!(c.flux.amplitude >= 0.0)) throw ConfigError("flux.amplitude must be nonnegative");
    if (!(c.flux.pulse >= 0.0 && c.flux.pulse < 1.0)) throw ConfigError("flux.pulse must lie in [0, 1)");
    positive(c.flux.period, "flux.period");
  }
  if (!c.hopf_auto) {
    positive(c.eps, "hopf.eps");
    if (!(c.rho > 0.0 && c.rho < 1.0)) throw ConfigError("hopf.rho must lie in (0, 1)");
  }
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const auto& t = setters();
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError(fmt::format("unknown key '{}'", key));
  if (value.empty()) throw ConfigError(fmt::format("{}: empty value", key));
  it->second(cfg, key, value);
}

std::vector<std::string> scenario_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : setters()) keys.push_back(k);
  return keys;
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot read scenario '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace hopfflow
