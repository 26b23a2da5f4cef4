#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hopfflow/audit.hpp"
#include "hopfflow/scenario.hpp"

namespace hopfflow {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitCertificate = 3 };

struct RunOptions {
  std::string out_dir = "out";
  int snapshots = -1;  // overrides output.snapshots when >= 0
  bool strict = false;
};

/// Everything a run writes, keyed by relative path. Built fully in memory so a
/// failure leaves no partial output behind.
struct RunArtifacts {
  AuditReport report;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> files;
};

/// Column order: t, X, Y, F, w_l2, theta_l2, theta_min, theta_max, flux_residual.
std::string timeseries_csv(const AuditReport& rep);
/// One block per certificate, each number tagged with its equation reference.
std::string certificate_report(const ScenarioConfig& cfg, const AuditReport& rep);

/// Full pipeline for one scenario. `source` is the scenario text used for the
/// manifest hash. Throws NumericalAbort, ConfigError and friends.
RunArtifacts run_pipeline(const ScenarioConfig& cfg, const std::string& source);

/// Static validation without time integration. Stops at the first failing
/// stage that later stages depend on.
std::vector<Certificate> check_scenario(const ScenarioConfig& cfg);

/// Writes artifacts under dir, creating it; also writes manifest.json.
void write_artifacts(const std::string& dir, const RunArtifacts& art, const std::string& scenario_hash);

int cmd_run(const std::string& path, const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& path, const std::string& axis, const std::vector<std::string>& values, const RunOptions& opt,
              std::ostream& out, std::ostream& err);

}  // namespace hopfflow
