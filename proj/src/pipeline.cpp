#include "hopfflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "hopfflow/solver.hpp"
#include "hopfflow/svg.hpp"

namespace hopfflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot read scenario '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string hash_hex(const std::string& text) { return fmt::format("{:016x}", fnv1a(text)); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json certificate_json(const Certificate& c) {
  return json{{"name", c.name}, {"reference", c.reference}, {"lhs", c.lhs},       {"rhs", c.rhs},
              {"pass", c.pass}, {"advisory", c.advisory},   {"detail", c.detail}, {"margin", c.margin()}};
}

std::string snapshot_text(const Problem& p, const State& s) {
  const auto [v, theta] = p.reconstruct(s);
  const Eigen::VectorXd w = p.w_nodes(s.c);
  const QuadratureGrid& g = p.domain().grid;
  const std::size_t N = g.size();
  std::string out = fmt::format("# t = {}\n# x1 x2 x3 w1 w2 w3 v1 v2 v3 theta\n", num(s.t));
  for (std::size_t q = 0; q < N; ++q) {
    const Vec3 x = g.point(q);
    out += fmt::format("{:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n", x[0], x[1], x[2],
                       w(static_cast<Eigen::Index>(q)), w(static_cast<Eigen::Index>(N + q)), w(static_cast<Eigen::Index>(2 * N + q)),
                       v.comp[0].values[q], v.comp[1].values[q], v.comp[2].values[q], theta.values[q]);
  }
  return out;
}

bool failing(const std::vector<Certificate>& certs) {
  for (const auto& c : certs)
    if (!c.pass && !c.advisory) return true;
  return false;
}

std::string failing_refs(const std::vector<Certificate>& certs) {
  std::string s;
  for (const auto& c : certs)
    if (!c.pass && !c.advisory) s += (s.empty() ? "" : "; ") + c.name + " " + c.reference;
  return s;
}

void print_certificates(const std::vector<Certificate>& certs, std::ostream& out) {
  for (const auto& c : certs)
    out << fmt::format("{:<8} {:<30} {:<18} lhs = {:.6e}  rhs = {:.6e}{}\n", c.pass ? "PASS" : (c.advisory ? "ADVISORY" : "FAIL"), c.name,
                       c.reference, c.lhs, c.rhs, c.detail.empty() ? "" : "  " + c.detail);
}

}  // namespace

std::string timeseries_csv(const AuditReport& rep) {
  std::string out = "t,X,Y,F,w_l2,theta_l2,theta_min,theta_max,flux_residual\n";
  for (const auto& s : rep.samples)
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", num(s.t), num(s.X), num(s.Y), num(s.F), num(s.w_l2), num(s.theta_l2), num(s.theta_min),
                       num(s.theta_max), num(s.flux_residual));
  return out;
}

std::string certificate_report(const ScenarioConfig& cfg, const AuditReport& rep) {
  std::string out = fmt::format("scenario {}\n", cfg.name);
  out += fmt::format("calibration (3.13): c1 = {:.10e}, c2 = {:.10e}, M = {:.10e}, min decay ratio = {:.10e}, rayleigh reference = {:.10e}\n",
                     rep.cal.c1, rep.cal.c2, rep.cal.M, rep.cal.ratio_min, rep.cal.rayleigh_ref);
  out += fmt::format("window budgets (3.40): A1 = {:.10e}, A2 (3.39) = {:.10e}\n", rep.A1, rep.A2);
  for (std::size_t k = 0; k < rep.window_F.size(); ++k) out += fmt::format("  window {} (3.40): int F = {:.10e}\n", k, rep.window_F[k]);
  out += "\n";
  for (const auto& c : rep.certificates) {
    out += fmt::format("[{}] {} {}\n", c.pass ? "PASS" : (c.advisory ? "ADVISORY-FAIL" : "FAIL"), c.name, c.reference);
    out += fmt::format("  {} lhs = {:.10e}\n  {} rhs = {:.10e}\n  {} margin = {:.10e}\n", c.reference, c.lhs, c.reference, c.rhs, c.reference,
                       c.margin());
    if (!c.detail.empty()) out += fmt::format("  {}\n", c.detail);
  }
  out += fmt::format("\noverall: {}\n", rep.all_pass() ? "PASS" : "FAIL");
  return out;
}

RunArtifacts run_pipeline(const ScenarioConfig& cfg, const std::string& source) {
  RunArtifacts art;
  Problem p(cfg);
  const Trajectory tr = run_windows(p, p.initial_state(), cfg.T, cfg.windows, cfg.dt, cfg.sample_every);
  art.warnings = tr.warnings;
  art.report = audit_run(p, tr);
  const AuditReport& rep = art.report;

  art.files["timeseries.csv"] = timeseries_csv(rep);
  art.files["certificates.txt"] = certificate_report(cfg, rep);
  art.files["basis_manifest.txt"] = basis_manifest(p.velocity_basis(), p.temperature_basis());

  json summary;
  summary["scenario"] = cfg.name;
  summary["scenario_hash"] = hash_hex(source);
  summary["version"] = kVersion;
  summary["calibration"] = {{"c1", rep.cal.c1}, {"c2", rep.cal.c2}, {"M", rep.cal.M}, {"ratio_min", rep.cal.ratio_min},
                            {"rayleigh_reference", rep.cal.rayleigh_ref}};
  summary["A1"] = rep.A1;
  summary["A2"] = rep.A2;
  summary["window_F"] = rep.window_F;
  if (p.has_flux()) summary["hopf"] = {{"eps", p.hopf().eps}, {"rho", p.hopf().rho}, {"r", p.hopf().r()}, {"flux_norm", p.flux_norm()}};
  summary["certificates"] = json::array();
  for (const auto& c : rep.certificates) summary["certificates"].push_back(certificate_json(c));
  summary["all_pass"] = rep.all_pass();
  summary["warnings"] = tr.warnings;
  art.files["summary.json"] = summary.dump(2) + "\n";

  Chart energy{"Energy ledger", "t", "value", true, {}};
  Chart temp{"Temperature range", "t", "theta", false, {}};
  Series X{"X", {}, {}}, Y{"Y", {}, {}}, F{"F", {}, {}}, lo{"min theta", {}, {}}, hi{"max theta", {}, {}};
  for (const auto& s : rep.samples) {
    for (Series* se : {&X, &Y, &F, &lo, &hi}) se->x.push_back(s.t);
    X.y.push_back(s.X);
    Y.y.push_back(s.Y);
    F.y.push_back(s.F);
    lo.y.push_back(s.theta_min);
    hi.y.push_back(s.theta_max);
  }
  energy.series = {X, Y, F};
  temp.series = {lo, hi, Series{"bounds", {rep.samples.front().t, rep.samples.back().t}, {cfg.theta_lower, cfg.theta_lower}},
                 Series{"", {rep.samples.front().t, rep.samples.back().t}, {cfg.theta_upper, cfg.theta_upper}}};
  art.files["plots/energy.svg"] = render_svg(energy);
  art.files["plots/temperature.svg"] = render_svg(temp);

  if (cfg.snapshots > 0) {
    const auto& g = p.domain().grid;
    std::string index = fmt::format("grid {} {} {}\nlayout point-major, x3 fastest\nfields x1 x2 x3 w1 w2 w3 v1 v2 v3 theta\n", g.n(0),
                                    g.n(1), g.n(2));
    for (std::size_t i = 0; i < tr.samples.size(); i += static_cast<std::size_t>(cfg.snapshots)) {
      const std::string name = fmt::format("snapshots/snap_{:06d}.txt", i);
      art.files[name] = snapshot_text(p, tr.samples[i]);
      index += fmt::format("{} t = {}\n", name, num(tr.samples[i].t));
    }
    art.files["snapshots/manifest.txt"] = index;
  }
  return art;
}

std::vector<Certificate> check_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  std::vector<Certificate> pre;
  auto add = [&pre](std::string name, std::string ref, double lhs, double rhs, bool pass, std::string detail) {
    Certificate c;
    c.name = std::move(name);
    c.reference = std::move(ref);
    c.lhs = lhs;
    c.rhs = rhs;
    c.pass = pass;
    c.detail = std::move(detail);
    pre.push_back(std::move(c));
  };
  const Domain domain = build_domain(cfg.domain);
  const double horizon = cfg.T * cfg.windows;
  if (cfg.flux_profile != "none" && cfg.flux.amplitude > 0.0) {
    const FluxProfile profile = make_flux_profile(cfg.flux_profile, cfg.domain, cfg.flux);
    double worst = 0.0;
    for (int i = 0; i <= 64; ++i) worst = std::max(worst, check_compatibility(profile, domain, horizon * i / 64.0));
    add("compatibility", "(1.2)", worst, cfg.compat_tol, worst <= cfg.compat_tol, "inflow and outflow through the caps must balance");
    if (worst <= cfg.compat_tol) {
      const ExtendedFlux flux(profile, cfg.domain);
      const double norm = flux.w13inf_norm_sup(horizon);
      HopfParams h;
      std::string why;
      bool regime = true;
      if (cfg.hopf_auto) {
        try {
          h = select_params(cfg.nu, norm, cfg.c_cal);
        } catch (const std::exception& e) {
          regime = false;
          why = e.what();
        }
      } else {
        h.eps = cfg.eps;
        h.rho = cfg.rho;
        h.c_cal = cfg.c_cal;
        regime = h.rho < 1.0;
        if (!regime) why = "rho must lie below 1";
      }
      if (regime && !(h.rho < cfg.domain.a)) {
        regime = false;
        why = fmt::format("rho = {:.6g} must be smaller than a = {:.6g}", h.rho, cfg.domain.a);
      }
      add("hopf_regime", "(3.29)", h.rho, std::min(1.0, cfg.domain.a), regime, why);
      if (regime) {
        const double lhs = smallness_lhs(h, norm);
        add("hopf_smallness", "(3.30)", lhs, cfg.nu / 4.0, lhs <= cfg.nu / 4.0 * (1.0 + 1e-12), fmt::format("eps = {:.6g}, rho = {:.6g}", h.eps, h.rho));
      }
    }
  }
  pre.push_back(weight_certificate(cfg.mu));
  if (failing(pre)) return pre;
  Problem p(cfg);
  return static_certificates(p);
}

void write_artifacts(const std::string& dir, const RunArtifacts& art, const std::string& scenario_hash) {
  const std::string started = utc_now();
  fs::create_directories(dir);
  json outputs = json::array();
  for (const auto& [name, text] : art.files) {
    const fs::path path = fs::path(dir) / name;
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    outputs.push_back(name);
  }
  outputs.push_back("manifest.json");
  json manifest{{"scenario_hash", scenario_hash}, {"version", kVersion},     {"written_at", started},
                {"outputs", outputs},            {"seed", nullptr},          {"deterministic", true}};
  std::ofstream f(fs::path(dir) / "manifest.json", std::ios::binary);
  f << manifest.dump(2) << "\n";
}

int cmd_run(const std::string& path, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  std::string text;
  try {
    text = read_file(path);
    cfg = parse_scenario(text);
    if (opt.snapshots >= 0) cfg.snapshots = opt.snapshots;
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  RunArtifacts art;
  try {
    art = run_pipeline(cfg, text);
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << "\n";
    fs::create_directories(opt.out_dir);
    std::ofstream f(fs::path(opt.out_dir) / "abort.txt");
    f << fmt::format("reason: {}\nlast valid t = {}\n", e.what(), num(e.last_valid.t));
    for (Eigen::Index i = 0; i < e.last_valid.c.size(); ++i) f << fmt::format("c[{}] = {}\n", i, num(e.last_valid.c(i)));
    for (Eigen::Index i = 0; i < e.last_valid.d.size(); ++i) f << fmt::format("d[{}] = {}\n", i, num(e.last_valid.d(i)));
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    // Parameter-regime failures surface here (for example rho >= 1).
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  write_artifacts(opt.out_dir, art, hash_hex(text));
  for (const auto& w : art.warnings) err << "warning: " << w << "\n";
  print_certificates(art.report.certificates, out);
  out << fmt::format("overall: {} (outputs in {})\n", art.report.all_pass() ? "PASS" : "FAIL", opt.out_dir);
  if (opt.strict && !art.report.all_pass()) return kExitCertificate;
  return kExitOk;
}

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig cfg = load_scenario(path);
    const auto certs = check_scenario(cfg);
    print_certificates(certs, out);
    if (failing(certs)) {
      err << "check failed: " << failing_refs(certs) << "\n";
      return kExitConfig;
    }
    out << "check: PASS\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_sweep(const std::string& path, const std::string& axis, const std::vector<std::string>& values, const RunOptions& opt,
              std::ostream& out, std::ostream& err) {
  const bool any = std::any_of(values.begin(), values.end(), [](const std::string& v) { return !v.empty(); });
  if (!any) {
    err << "usage error: sweep needs a non-empty --values list\n";
    return kExitConfig;
  }
  ScenarioConfig base;
  std::string text;
  try {
    text = read_file(path);
    base = parse_scenario(text);
    if (opt.snapshots >= 0) base.snapshots = opt.snapshots;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::string table = "value,status,c2,lemma_2_2_ratio,estimate_3_19_ratio,A1,final_X,all_pass,note\n";
  Chart energy{fmt::format("X(t) over {}", axis), "t", "X", true, {}};
  Series s_c2{"c2", {}, {}}, s_l22{"lemma 2.2 ratio", {}, {}}, s_319{"(3.19) ratio", {}, {}};
  bool numeric_x = true;
  int code = kExitOk;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::string& val = values[k];
    if (val.empty()) continue;
    ScenarioConfig cfg = base;
    try {
      apply_setting(cfg, axis, val);
      validate(cfg);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
    double xv = static_cast<double>(k);
    try {
      xv = std::stod(val);
    } catch (...) {
      numeric_x = false;
    }
    std::vector<Certificate> pre;
    std::string note;
    try {
      pre = check_scenario(cfg);
    } catch (const std::exception& e) {
      note = e.what();
    }
    if (!note.empty() || failing(pre)) {
      if (note.empty()) note = failing_refs(pre);
      out << fmt::format("{} = {}: flagged, past the validity edge ({}); not run\n", axis, val, note);
      table += fmt::format("{},flagged,,,,,,,\"{}\"\n", val, note);
      if (opt.strict) code = kExitCertificate;
      continue;
    }
    try {
      RunArtifacts art = run_pipeline(cfg, text + "\n# sweep " + axis + " = " + val + "\n");
      const std::string sub = (fs::path(opt.out_dir) / fmt::format("{}={}", axis, val)).string();
      write_artifacts(sub, art, hash_hex(text + axis + val));
      const AuditReport& rep = art.report;
      const Certificate* l22 = rep.find("lemma_2_2");
      const Certificate* e319 = rep.find("estimate_3_19");
      const double r22 = l22 ? l22->lhs : NAN;
      const double r319 = e319 && e319->rhs > 0.0 ? e319->lhs / e319->rhs : NAN;
      table += fmt::format("{},ran,{},{},{},{},{},{},\n", val, num(rep.cal.c2), num(r22), num(r319), num(rep.A1), num(rep.samples.back().X),
                           rep.all_pass() ? "true" : "false");
      Series xs{fmt::format("{} = {}", axis, val), {}, {}};
      for (const auto& s : rep.samples) {
        xs.x.push_back(s.t);
        xs.y.push_back(s.X);
      }
      energy.series.push_back(std::move(xs));
      for (Series* se : {&s_c2, &s_l22, &s_319}) se->x.push_back(xv);
      s_c2.y.push_back(rep.cal.c2);
      s_l22.y.push_back(r22);
      s_319.y.push_back(r319);
      out << fmt::format("{} = {}: ran, c2 = {:.6g}, lemma 2.2 ratio = {:.6g}, (3.19) ratio = {:.6g}, certificates {}\n", axis, val,
                         rep.cal.c2, r22, r319, rep.all_pass() ? "PASS" : "FAIL");
      if (opt.strict && !rep.all_pass() && code == kExitOk) code = kExitCertificate;
    } catch (const NumericalAbort& e) {
      out << fmt::format("{} = {}: numerical abort ({})\n", axis, val, e.what());
      table += fmt::format("{},aborted,,,,,,,\"{}\"\n", val, e.what());
      code = kExitNumerical;
    }
  }
  fs::create_directories(opt.out_dir);
  {
    std::ofstream f(fs::path(opt.out_dir) / "sweep.csv", std::ios::binary);
    f << table;
  }
  {
    std::ofstream f(fs::path(opt.out_dir) / "sweep_energy.svg", std::ios::binary);
    f << render_svg(energy);
  }
  {
    Chart constants{fmt::format("Empirical constants over {}", axis), numeric_x ? axis : axis + " (index)", "value", true, {s_c2, s_l22, s_319}};
    std::ofstream f(fs::path(opt.out_dir) / "sweep_constants.svg", std::ios::binary);
    f << render_svg(constants);
  }
  out << fmt::format("sweep table written to {}\n", (fs::path(opt.out_dir) / "sweep.csv").string());
  return code;
}

}  // namespace hopfflow
