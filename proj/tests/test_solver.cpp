#include "doctest.h"

#include <cmath>
#include <random>

#include "hopfflow/solver.hpp"

using namespace hopfflow;

namespace {
ScenarioConfig small(const std::string& name, int m = 6) {
  ScenarioConfig c = load_scenario(std::string(HOPFFLOW_SCENARIO_DIR) + "/" + name + ".scn");
  c.domain.N1 = c.domain.N2 = 8;
  c.domain.N3 = 16;
  c.m_velocity = c.m_temperature = m;
  return c;
}

State random_state(const Problem& p, unsigned seed, double t) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  State s;
  s.t = t;
  s.c.resize(static_cast<Eigen::Index>(p.mv()));
  s.d.resize(static_cast<Eigen::Index>(p.mt()));
  for (Eigen::Index i = 0; i < s.c.size(); ++i) s.c(i) = n(rng);
  for (Eigen::Index i = 0; i < s.d.size(); ++i) s.d(i) = 1.5 + n(rng);
  return s;
}
}  // namespace

TEST_CASE("fast right-hand side equals the direct quadrature oracle") {
  for (const char* name : {"free-decay", "large-flux-pulsed", "heated-front", "parabolic-inflow"}) {
    CAPTURE(name);
    const ScenarioConfig cfg = small(name);
    const Problem p(cfg);
    for (unsigned seed : {1u, 2u}) {
      const State s = random_state(p, seed, 0.37);
      const auto [ov, ot] = oracle_rhs(p, s);
      const Eigen::VectorXd fv = p.rhs_velocity(s), ft = p.rhs_temperature(s);
      CHECK((fv - ov).norm() <= 1e-8 * std::max(1.0, ov.norm()));
      CHECK((ft - ot).norm() <= 1e-8 * std::max(1.0, ot.norm()));
    }
  }
}

TEST_CASE("advection is skew: no energy exchange through the trilinear terms") {
  ScenarioConfig cfg = small("free-decay", 12);
  const Problem p(cfg);
  const State s = random_state(p, 3, 0.0);
  const Eigen::VectorXd nv = p.explicit_velocity(0.0, s.c, s.d);
  const Eigen::VectorXd nt = p.explicit_temperature(0.0, s.c, s.d);
  CHECK(std::abs(s.c.dot(nv)) <= 1e-12 * nv.norm() * s.c.norm());
  CHECK(std::abs(s.d.dot(nt)) <= 1e-12 * std::max(1e-300, nt.norm() * s.d.norm()));
}

TEST_CASE("pure diffusion of one temperature mode follows the exponential, second order in dt") {
  ScenarioConfig cfg = small("free-decay", 8);
  cfg.w_amp = 0.0;
  const Problem p(cfg);
  State s0;
  s0.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.mv()));
  s0.d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.mt()));
  s0.d(3) = 1.0;
  const double lam = p.forms().K_theta(3, 3);
  const double T = 0.4;
  double err_prev = 0.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    const Trajectory tr = run_windows(p, s0, T, 1, dt, 1000);
    const double err = std::abs(tr.samples.back().d(3) - std::exp(-lam * T));
    CHECK(err < 1e-2);
    if (err_prev > 0.0) CHECK(err_prev / err == doctest::Approx(4.0).epsilon(0.15));
    err_prev = err;
  }
}

TEST_CASE("uniform temperature without inflow stays uniform") {
  ScenarioConfig cfg = small("free-decay", 8);
  cfg.theta0.kind = Theta0Spec::Kind::Constant;
  cfg.theta0.value = 1.0;
  cfg.T = 0.2;
  const Problem p(cfg);
  const Trajectory tr = run_windows(p, p.initial_state(), cfg.T, 2, cfg.dt, 10);
  for (const auto& s : tr.samples) {
    const Eigen::VectorXd th = p.theta_nodes(s.d);
    CHECK((th.array() - 1.0).abs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("reconstructed velocity carries the prescribed outflow at every sample") {
  ScenarioConfig cfg = small("large-flux-pulsed", 6);
  cfg.T = 0.1;
  const Problem p(cfg);
  const Trajectory tr = run_windows(p, p.initial_state(), cfg.T, 2, cfg.dt, 5);
  REQUIRE(tr.window_start.size() == 3);
  CHECK(tr.window_start.back() == tr.samples.size() - 1);
  for (const auto& s : tr.samples) CHECK(p.flux_residual(s) <= 1e-10);
}

TEST_CASE("non-finite growth aborts with the last finite state") {
  ScenarioConfig cfg = small("free-decay", 6);
  cfg.w_amp = 1e160;
  const Problem p(cfg);
  try {
    run_windows(p, p.initial_state(), cfg.T, 1, cfg.dt, 1);
    FAIL("expected an abort");
  } catch (const NumericalAbort& e) {
    CHECK(e.last_valid.c.allFinite());
  }
}

TEST_CASE("free decay without data loses energy at every step") {
  ScenarioConfig cfg = small("free-decay", 10);
  cfg.T = 0.2;
  const Problem p(cfg);
  const Trajectory tr = run_windows(p, p.initial_state(), cfg.T, 1, cfg.dt, 1);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].c.squaredNorm() <= tr.samples[i - 1].c.squaredNorm());
}
