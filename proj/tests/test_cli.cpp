#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hopfflow/pipeline.hpp"

using namespace hopfflow;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hopfflow_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Small, fast variant of a bundled scenario with extra lines appended.
fs::path write_scenario(const fs::path& dir, const std::string& base, const std::string& extra) {
  std::string text = read(fs::path(HOPFFLOW_SCENARIO_DIR) / (base + ".scn"));
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto key = line.substr(0, line.find(' '));
    if (key == "domain.N1" || key == "domain.N2" || key == "domain.N3" || key == "galerkin.m" || key == "galerkin.T" ||
        key == "galerkin.windows" || key == "audit.calib_T" || extra.find(key + " ") != std::string::npos)
      continue;
    out += line + "\n";
  }
  out += "domain.N1 = 8\ndomain.N2 = 8\ndomain.N3 = 16\ngalerkin.m = 6\ngalerkin.T = 0.1\ngalerkin.windows = 2\naudit.calib_T = 0.1\n" + extra;
  const fs::path p = dir / (base + ".scn");
  std::ofstream(p) << out;
  return p;
}
}  // namespace

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_scenario("name = x\nphysics.nu = 1\nphysics.nu = 2\n"), doctest::Contains("line 3"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario("# comment\nphysics.nu 1\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario("physics.viscosity = 1\n"), doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("galerkin.T = 1\ngalerkin.dt = 0.3\n"), ConfigError);
}

TEST_CASE("scenario hash is stable FNV-1a") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("malformed scenario: config exit code and no partial output") {
  const fs::path dir = scratch("malformed");
  const fs::path scn = dir / "bad.scn";
  std::ofstream(scn) << "name = bad\nphysics.nu = -\n";
  RunOptions opt;
  opt.out_dir = (dir / "out").string();
  std::ostringstream out, err;
  CHECK(cmd_run(scn.string(), opt, out, err) == kExitConfig);
  CHECK(err.str().find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("run writes every listed output and is byte deterministic") {
  const fs::path dir = scratch("determinism");
  const fs::path scn = write_scenario(dir, "heated-front", "output.snapshots = 10\n");
  std::ostringstream out, err;
  RunOptions a, b;
  a.out_dir = (dir / "a").string();
  b.out_dir = (dir / "b").string();
  REQUIRE(cmd_run(scn.string(), a, out, err) == kExitOk);
  REQUIRE(cmd_run(scn.string(), b, out, err) == kExitOk);
  for (const char* f : {"timeseries.csv", "certificates.txt", "summary.json", "basis_manifest.txt"}) CHECK(read(dir / "a" / f) == read(dir / "b" / f));
  const std::string csv = read(dir / "a" / "timeseries.csv");
  CHECK(csv.rfind("t,X,Y,F,w_l2,theta_l2,theta_min,theta_max,flux_residual\n", 0) == 0);
  const std::string manifest = read(dir / "a" / "manifest.json");
  for (const char* f : {"timeseries.csv", "certificates.txt", "summary.json", "plots/energy.svg", "snapshots/manifest.txt"}) {
    CHECK(manifest.find(f) != std::string::npos);
    CHECK(fs::exists(dir / "a" / f));
  }
  // Every certificate line names its equation reference.
  const std::string certs = read(dir / "a" / "certificates.txt");
  CHECK(certs.find("(3.13) lhs") != std::string::npos);
  CHECK(certs.find("(3.41) rhs") != std::string::npos);
}

TEST_CASE("strict mode turns a failed certificate into exit code 3") {
  const fs::path dir = scratch("strict");
  const fs::path scn = write_scenario(dir, "heated-front", "audit.overshoot_tol = 1e-9\n");
  std::ostringstream out, err;
  RunOptions opt;
  opt.out_dir = (dir / "out").string();
  CHECK(cmd_run(scn.string(), opt, out, err) == kExitOk);
  opt.strict = true;
  CHECK(cmd_run(scn.string(), opt, out, err) == kExitCertificate);
}

TEST_CASE("check names the violated hypothesis") {
  const fs::path dir = scratch("check");
  std::ostringstream out, err;
  const fs::path ok = write_scenario(dir, "parabolic-inflow", "");
  CHECK(cmd_check(ok.string(), out, err) == kExitOk);

  const fs::path incompatible = write_scenario(dir, "large-flux-pulsed", "flux.outflow_scale = 1.2\n");
  std::ostringstream e1;
  CHECK(cmd_check(incompatible.string(), out, e1) == kExitConfig);
  CHECK(e1.str().find("(1.2)") != std::string::npos);

  const fs::path weak = write_scenario(dir, "parabolic-inflow", "physics.nu = 50\n");
  std::ostringstream e2;
  CHECK(cmd_check(weak.string(), out, e2) == kExitConfig);
  CHECK(e2.str().find("(3.29)") != std::string::npos);
}

TEST_CASE("sweep: empty values are a usage error, runs past the regime edge are flagged") {
  const fs::path dir = scratch("sweep");
  const fs::path scn = write_scenario(dir, "parabolic-inflow", "");
  RunOptions opt;
  opt.out_dir = (dir / "out").string();
  std::ostringstream out, err;
  CHECK(cmd_sweep(scn.string(), "flux.amplitude", {}, opt, out, err) == kExitConfig);
  CHECK(cmd_sweep(scn.string(), "flux.amplitude", {""}, opt, out, err) == kExitConfig);

  std::ostringstream o2;
  CHECK(cmd_sweep(scn.string(), "flux.amplitude", {"0.001", "0.5"}, opt, o2, err) == kExitOk);
  const std::string table = read(dir / "out" / "sweep.csv");
  CHECK(table.find("0.001,flagged") != std::string::npos);
  CHECK(table.find("0.5,ran") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "sweep_constants.svg"));
  CHECK(fs::exists(dir / "out" / "flux.amplitude=0.5" / "timeseries.csv"));
}

TEST_CASE("binary exit codes") {
  const fs::path dir = scratch("binary");
  const fs::path scn = write_scenario(dir, "free-decay", "");
  const std::string cli = HOPFFLOW_CLI;
  auto code = [](const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  CHECK(code(cli + " check " + scn.string()) == 0);
  CHECK(code(cli + " run " + (dir / "missing.scn").string()) == 1);
  CHECK(code(cli + " sweep " + scn.string() + " --axis galerkin.m --values ''") == 1);
  CHECK(code(cli + " frobnicate") == 1);
}
