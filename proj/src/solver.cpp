#include "hopfflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace hopfflow {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// n . D(u) . tau with D = grad u + grad u^T, g[3*c+b] = du_c/dx_b.
double n_D_tau(const Vec3& n, const std::array<double, 9>& g, const Vec3& tau) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int b = 0; b < 3; ++b) s += n[c] * (g[3 * c + b] + g[3 * b + c]) * tau[b];
  return s;
}

}  // namespace

Problem::Problem(const ScenarioConfig& cfg) : Problem(cfg, false) {}

Problem::Problem(const ScenarioConfig& cfg, bool drop_data) : cfg_(cfg), domain_(build_domain(cfg.domain)) {
  build(drop_data);
}

void Problem::build(bool drop_data) {
  validate(cfg_);
  const QuadratureGrid& grid = domain_.grid;
  const std::size_t n = grid.size();
  const double horizon = cfg_.T * cfg_.windows;

  if (!drop_data && cfg_.flux_profile != "none" && cfg_.flux.amplitude > 0.0) {
    profile_ = make_flux_profile(cfg_.flux_profile, cfg_.domain, cfg_.flux);
    flux_ = std::make_unique<ExtendedFlux>(profile_, cfg_.domain);
    flux_norm_ = flux_->w13inf_norm_sup(horizon);
    if (cfg_.hopf_auto) {
      hopf_ = select_params(cfg_.nu, flux_norm_, cfg_.c_cal);
    } else {
      hopf_.eps = cfg_.eps;
      hopf_.rho = cfg_.rho;
      hopf_.c_cal = cfg_.c_cal;
    }
    ext_ = std::make_unique<HopfExtension>(*flux_, hopf_, domain_);
  } else {
    profile_ = make_flux_profile("none", cfg_.domain, cfg_.flux);
  }

  vb_ = build_velocity_basis(cfg_.domain, cfg_.m_velocity, {cfg_.nu, cfg_.gamma});
  tb_ = build_temperature_basis(cfg_.domain, cfg_.m_temperature);
  forms_ = assemble_forms(vb_, tb_, cfg_.nu, cfg_.gamma, cfg_.kappa);

  const Eigen::Index m = static_cast<Eigen::Index>(mv()), mtt = static_cast<Eigen::Index>(mt());
  const Eigen::Index N = static_cast<Eigen::Index>(n);
  psi_val_.resize(3 * N, m);
  psi_grad_.resize(9 * N, m);
  phi_val_.resize(N, mtt);
  phi_grad_.resize(3 * N, mtt);
  for (Eigen::Index q = 0; q < N; ++q) {
    const Vec3 x = grid.point(static_cast<std::size_t>(q));
    for (Eigen::Index k = 0; k < m; ++k) {
      const Vec3 v = vb_.modes[k].value(x, cfg_.domain);
      const auto g = vb_.modes[k].grad(x, cfg_.domain);
      for (int c = 0; c < 3; ++c) psi_val_(c * N + q, k) = v[c];
      for (int r = 0; r < 9; ++r) psi_grad_(r * N + q, k) = g[r];
    }
    for (Eigen::Index k = 0; k < mtt; ++k) {
      phi_val_(q, k) = tb_.modes[k].value(x, cfg_.domain);
      const Vec3 g = tb_.modes[k].grad(x, cfg_.domain);
      for (int c = 0; c < 3; ++c) phi_grad_(c * N + q, k) = g[c];
    }
  }

  force_active_ = !drop_data && !cfg_.force.is_zero();
  force_ = Eigen::VectorXd::Zero(3 * N);
  if (force_active_) {
    for (Eigen::Index q = 0; q < N; ++q) {
      const Vec3 f = cfg_.force(grid.point(static_cast<std::size_t>(q)), cfg_.domain);
      for (int c = 0; c < 3; ++c) force_(c * N + q) = f[c];
    }
    if (cfg_.omega.kind == OmegaSpec::Kind::Constant)
      omega_f_const_ = Eigen::VectorXd(psi_val_.transpose() * force_ * (cfg_.omega.w0 * grid.weight()));
  }

  // Upper cap normal velocity and lower cap inflow weights.
  const BoundaryPatch& up = domain_.upper_cap();
  const Eigen::Index nc = static_cast<Eigen::Index>(up.nodes.size());
  psi_upper_.resize(nc, m);
  upper_weights_.resize(nc);
  upper_delta_n_ = Eigen::VectorXd::Zero(nc);
  for (Eigen::Index q = 0; q < nc; ++q) {
    upper_weights_(q) = up.weights[q];
    for (Eigen::Index k = 0; k < m; ++k) psi_upper_(q, k) = dot3(vb_.modes[k].value(up.nodes[q], cfg_.domain), up.normal);
  }
  inflow_theta_ = Eigen::VectorXd::Zero(mtt);

  b_unit_ = fvisc_unit_ = ft_unit_ = fnl_unit_ = Eigen::VectorXd::Zero(m);
  h_delta_ = Eigen::MatrixXd::Zero(m, m);
  t_delta_ = Eigen::MatrixXd::Zero(mtt, mtt);
  psi_delta_ = psi_delta_grad_ = Eigen::VectorXd::Zero(m);
  if (ext_) precompute_extension_terms();

  // Explicit stability estimate: advective CFL on the largest wavenumber.
  double kmax = 0.0;
  for (const auto& md : vb_.modes)
    for (int a = 0; a < 3; ++a) kmax = std::max(kmax, std::numbers::pi * md.k[a] / cfg_.domain.length(a));
  for (const auto& md : tb_.modes)
    for (int a = 0; a < 3; ++a) kmax = std::max(kmax, std::numbers::pi * md.k[a] / cfg_.domain.length(a));
  double umax = 0.0;
  if (ext_) {
    const auto& vol = ext_->volume();
    for (std::size_t q = 0; q < vol.size(); ++q)
      umax = std::max(umax, std::sqrt(vol.delta[0][q] * vol.delta[0][q] + vol.delta[1][q] * vol.delta[1][q] +
                                      vol.delta[2][q] * vol.delta[2][q]));
    umax *= cfg_.flux.amplitude * (1.0 + (cfg_.flux_profile == "pulsed" ? cfg_.flux.pulse : 0.0));
  }
  umax += std::abs(cfg_.w_amp) * std::sqrt(3.0 / std::max(1e-300, cfg_.domain.volume())) * 3.0;
  stability_dt_ = umax > 0.0 && kmax > 0.0 ? 1.0 / (umax * kmax) : std::numeric_limits<double>::infinity();
}

void Problem::precompute_extension_terms() {
  const QuadratureGrid& grid = domain_.grid;
  const Eigen::Index N = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index m = static_cast<Eigen::Index>(mv()), mtt = static_cast<Eigen::Index>(mt());
  const double w = grid.weight();
  const double nu = cfg_.nu, gamma = cfg_.gamma;
  const ExtensionSamples& vol = ext_->volume();

  Eigen::VectorXd dv(3 * N), dg(9 * N);
  for (Eigen::Index q = 0; q < N; ++q) {
    for (int c = 0; c < 3; ++c) dv(c * N + q) = vol.delta[c][q];
    for (int r = 0; r < 9; ++r) dg(r * N + q) = vol.grad[r][q];
  }
  ft_unit_ = -(psi_val_.transpose() * dv) * w;
  psi_delta_ = -ft_unit_;
  psi_delta_grad_ = (psi_grad_.transpose() * dg) * w;
  delta_l2_sq_ = dv.squaredNorm() * w;
  delta_grad_sq_ = dg.squaredNorm() * w;

  Eigen::VectorXd adv(3 * N), sym(9 * N);
  for (Eigen::Index q = 0; q < N; ++q) {
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int b = 0; b < 3; ++b) s += dv(b * N + q) * dg((3 * c + b) * N + q);
      adv(c * N + q) = s;
      for (int b = 0; b < 3; ++b) sym((3 * c + b) * N + q) = dg((3 * c + b) * N + q) + dg((3 * b + c) * N + q);
    }
  }
  fnl_unit_ = -(psi_val_.transpose() * adv) * w;
  // (nu/2) int D(delta):D(psi) = nu int D(delta):grad psi.
  fvisc_unit_ = -nu * (psi_grad_.transpose() * sym) * w;

  for (std::size_t pi = 0; pi < domain_.patches.size(); ++pi) {
    const BoundaryPatch& patch = domain_.patches[pi];
    const ExtensionSamples& ps = ext_->patch(pi);
    const bool lateral = patch.kind == PatchKind::Lateral;
    const double b2_scale = cfg_.b2_include_nu ? nu : 1.0;
    for (std::size_t q = 0; q < patch.nodes.size(); ++q) {
      std::array<double, 9> g{};
      for (int r = 0; r < 9; ++r) g[r] = ps.grad[r][q];
      const Vec3 dl{ps.delta[0][q], ps.delta[1][q], ps.delta[2][q]};
      for (const Vec3& tau : {patch.tau1, patch.tau2}) {
        const double ndt = n_D_tau(patch.normal, g, tau);
        const double bcoef = lateral ? (-nu * ndt - gamma * dot3(dl, tau)) : -b2_scale * ndt;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double pt = dot3(vb_.modes[k].value(patch.nodes[q], cfg_.domain), tau) * patch.weights[q];
          b_unit_(k) += bcoef * pt;
          fvisc_unit_(k) += nu * ndt * pt;
        }
      }
    }
  }

  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::VectorXd g(3 * N);
    for (Eigen::Index q = 0; q < N; ++q)
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int b = 0; b < 3; ++b)
          s += psi_val_(b * N + q, k) * dg((3 * c + b) * N + q) + dv(b * N + q) * psi_grad_((3 * c + b) * N + q, k);
        g(c * N + q) = s;
      }
    h_delta_.col(k) = (psi_val_.transpose() * g) * w;
  }
  for (Eigen::Index k = 0; k < mtt; ++k) {
    Eigen::VectorXd s(N);
    for (Eigen::Index q = 0; q < N; ++q) {
      double acc = 0.0;
      for (int b = 0; b < 3; ++b) acc += dv(b * N + q) * phi_grad_(b * N + q, k);
      s(q) = acc;
    }
    t_delta_.col(k) = (phi_val_.transpose() * s) * w;
  }

  const BoundaryPatch& up = domain_.upper_cap();
  const ExtensionSamples& us = ext_->patch(5);
  for (std::size_t q = 0; q < up.nodes.size(); ++q)
    upper_delta_n_(static_cast<Eigen::Index>(q)) = us.delta[0][q] * up.normal[0] + us.delta[1][q] * up.normal[1] + us.delta[2][q] * up.normal[2];
  const BoundaryPatch& lo = domain_.lower_cap();
  for (std::size_t q = 0; q < lo.nodes.size(); ++q) {
    const double g1 = flux_->shape(0, lo.nodes[q][0], lo.nodes[q][1]) * lo.weights[q];
    for (Eigen::Index k = 0; k < mtt; ++k) inflow_theta_(k) += g1 * tb_.modes[k].value(lo.nodes[q], cfg_.domain);
  }
}

Eigen::VectorXd Problem::explicit_velocity(double t, const Eigen::VectorXd& c, const Eigen::VectorXd& d) const {
  const Eigen::Index N = static_cast<Eigen::Index>(nodes());
  const double w = domain_.grid.weight();
  const Eigen::VectorXd u = psi_val_ * c;
  const Eigen::VectorXd gu = psi_grad_ * c;
  Eigen::VectorXd adv(3 * N);
  for (Eigen::Index q = 0; q < N; ++q)
    for (int cc = 0; cc < 3; ++cc)
      adv(cc * N + q) = u(q) * gu((3 * cc) * N + q) + u(N + q) * gu((3 * cc + 1) * N + q) + u(2 * N + q) * gu((3 * cc + 2) * N + q);
  Eigen::VectorXd out = -(psi_val_.transpose() * adv) * w;
  if (ext_) {
    const double A = amp(t), Ad = amp_rate(t);
    out += -A * (h_delta_ * c) + A * (b_unit_ + fvisc_unit_) + Ad * ft_unit_ + A * A * fnl_unit_;
  }
  if (omega_f_const_) {
    out += *omega_f_const_;
  } else if (force_active_) {
    const Eigen::VectorXd th = phi_val_ * d;
    Eigen::VectorXd g(3 * N);
    for (Eigen::Index q = 0; q < N; ++q) {
      const double om = cfg_.omega(th(q));
      for (int cc = 0; cc < 3; ++cc) g(cc * N + q) = om * force_(cc * N + q);
    }
    out += (psi_val_.transpose() * g) * w;
  }
  return out;
}

Eigen::VectorXd Problem::explicit_temperature(double t, const Eigen::VectorXd& c, const Eigen::VectorXd& d) const {
  const Eigen::Index N = static_cast<Eigen::Index>(nodes());
  const double w = domain_.grid.weight();
  const Eigen::VectorXd u = psi_val_ * c;
  const Eigen::VectorXd gt = phi_grad_ * d;
  Eigen::VectorXd s(N);
  for (Eigen::Index q = 0; q < N; ++q) s(q) = u(q) * gt(q) + u(N + q) * gt(N + q) + u(2 * N + q) * gt(2 * N + q);
  Eigen::VectorXd out = -(phi_val_.transpose() * s) * w;
  if (ext_) out -= amp(t) * (t_delta_ * d);
  return out;
}

Eigen::VectorXd Problem::rhs_velocity(const State& s) const {
  return explicit_velocity(s.t, s.c, s.d) - (forms_.K_visc + forms_.K_fric) * s.c;
}

Eigen::VectorXd Problem::rhs_temperature(const State& s) const {
  return explicit_temperature(s.t, s.c, s.d) - forms_.K_theta * s.d;
}

State Problem::initial_state() const {
  State s;
  s.t = 0.0;
  s.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mv()));
  const Eigen::Index k = std::min<Eigen::Index>(3, s.c.size());
  for (Eigen::Index i = 0; i < k; ++i) s.c(i) = cfg_.w_amp / std::sqrt(static_cast<double>(k));
  const QuadratureGrid& grid = domain_.grid;
  Eigen::VectorXd th(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t q = 0; q < grid.size(); ++q)
    th(static_cast<Eigen::Index>(q)) = cfg_.theta0(grid.point(q), cfg_.domain, cfg_.theta_lower, cfg_.theta_upper);
  s.d = (phi_val_.transpose() * th) * grid.weight();
  return s;
}

std::pair<VectorField, ScalarField> Problem::reconstruct(const State& s) const {
  const QuadratureGrid& grid = domain_.grid;
  const Eigen::Index N = static_cast<Eigen::Index>(grid.size());
  const Eigen::VectorXd u = psi_val_ * s.c;
  const double A = amp(s.t);
  VectorField v;
  for (int c = 0; c < 3; ++c) {
    v.comp[c] = ScalarField::zeros(grid);
    for (Eigen::Index q = 0; q < N; ++q) {
      double val = u(c * N + q);
      if (ext_) val += A * ext_->volume().delta[c][q];
      v.comp[c].values[q] = val;
    }
  }
  ScalarField th = ScalarField::zeros(grid);
  const Eigen::VectorXd tv = phi_val_ * s.d;
  for (Eigen::Index q = 0; q < N; ++q) th.values[q] = tv(q);
  return {std::move(v), std::move(th)};
}

double Problem::flux_residual(const State& s) const {
  const double A = amp(s.t);
  const Eigen::VectorXd vn = psi_upper_ * s.c + A * upper_delta_n_;
  const double out = upper_weights_.dot(vn);
  double target = 0.0;
  if (ext_) {
    const BoundaryPatch& up = domain_.upper_cap();
    for (std::size_t q = 0; q < up.nodes.size(); ++q) target += up.weights[q] * flux_->shape(1, up.nodes[q][0], up.nodes[q][1]);
    target *= A;
  }
  return std::abs(out - target) / std::max(1.0, std::abs(target));
}

double Problem::inflow_heat(const State& s) const { return ext_ ? amp(s.t) * inflow_theta_.dot(s.d) : 0.0; }

double Problem::theta_integral(const State& s) const { return (phi_val_ * s.d).sum() * domain_.grid.weight(); }

double Problem::forcing_norm(const Eigen::VectorXd& d) const {
  if (!force_active_) return 0.0;
  const Eigen::Index N = static_cast<Eigen::Index>(nodes());
  const Eigen::VectorXd th = phi_val_ * d;
  double acc = 0.0;
  for (Eigen::Index q = 0; q < N; ++q) {
    const double om = cfg_.omega(th(q));
    const double f = std::sqrt(force_(q) * force_(q) + force_(N + q) * force_(N + q) + force_(2 * N + q) * force_(2 * N + q));
    acc += std::pow(std::abs(om) * f, 1.2);
  }
  return std::pow(acc * domain_.grid.weight(), 1.0 / 1.2);
}

// ---------------------------------------------------------------------------

std::pair<Eigen::VectorXd, Eigen::VectorXd> oracle_rhs(const Problem& p, const State& s) {
  const ScenarioConfig& cfg = p.config();
  const DomainSpec& spec = cfg.domain;
  const QuadratureGrid& grid = p.domain().grid;
  const auto& vm = p.velocity_basis().modes;
  const auto& tm = p.temperature_basis().modes;
  const std::size_t m = vm.size(), mt = tm.size();
  const double nu = cfg.nu, gamma = cfg.gamma, kap = cfg.kappa;
  const double A = p.amp(s.t), Ad = p.amp_rate(s.t);
  const HopfExtension* ext = p.extension();
  Eigen::VectorXd rv = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  Eigen::VectorXd rt = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mt));

  std::vector<Vec3> pv(m);
  std::vector<std::array<double, 9>> pg(m);
  std::vector<double> tv(mt);
  std::vector<Vec3> tg(mt);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const Vec3 x = grid.point(q);
    Vec3 w{}, dl{}, f{};
    std::array<double, 9> gw{}, gd{};
    double th = 0.0;
    Vec3 gth{};
    for (std::size_t k = 0; k < m; ++k) {
      pv[k] = vm[k].value(x, spec);
      pg[k] = vm[k].grad(x, spec);
      for (int c = 0; c < 3; ++c) w[c] += s.c(k) * pv[k][c];
      for (int r = 0; r < 9; ++r) gw[r] += s.c(k) * pg[k][r];
    }
    for (std::size_t k = 0; k < mt; ++k) {
      tv[k] = tm[k].value(x, spec);
      tg[k] = tm[k].grad(x, spec);
      th += s.d(k) * tv[k];
      for (int c = 0; c < 3; ++c) gth[c] += s.d(k) * tg[k][c];
    }
    Vec3 dlt{};
    if (ext) {
      const auto& vol = ext->volume();
      for (int c = 0; c < 3; ++c) {
        dl[c] = A * vol.delta[c][q];
        dlt[c] = Ad * vol.delta[c][q];
      }
      for (int r = 0; r < 9; ++r) gd[r] = A * vol.grad[r][q];
    }
    if (p.has_force()) {
      const Vec3 fx = cfg.force(x, spec);
      const double om = cfg.omega(th);
      for (int c = 0; c < 3; ++c) f[c] = om * fx[c];
    }
    // Pointwise vector integrand paired with psi_j, and the symmetric gradient
    // of w + delta paired with D(psi_j).
    Vec3 body{};
    for (int c = 0; c < 3; ++c) {
      double h = 0.0;
      for (int b = 0; b < 3; ++b)
        h += w[b] * gw[3 * c + b] + w[b] * gd[3 * c + b] + dl[b] * gw[3 * c + b] + dl[b] * gd[3 * c + b];
      body[c] = -h + f[c] - dlt[c];
    }
    std::array<double, 9> Dv{};
    for (int c = 0; c < 3; ++c)
      for (int b = 0; b < 3; ++b) Dv[3 * c + b] = gw[3 * c + b] + gw[3 * b + c] + gd[3 * c + b] + gd[3 * b + c];
    const double wq = grid.weight();
    for (std::size_t j = 0; j < m; ++j) {
      double dd = 0.0;
      for (int c = 0; c < 3; ++c)
        for (int b = 0; b < 3; ++b) dd += Dv[3 * c + b] * (pg[j][3 * c + b] + pg[j][3 * b + c]);
      rv(static_cast<Eigen::Index>(j)) += wq * (dot3(body, pv[j]) - 0.5 * nu * dd);
    }
    const double adv = dot3(w, gth) + dot3(dl, gth);
    for (std::size_t j = 0; j < mt; ++j)
      rt(static_cast<Eigen::Index>(j)) += wq * (-adv * tv[j] - kap * dot3(gth, tg[j]));
  }

  for (std::size_t pi = 0; pi < p.domain().patches.size(); ++pi) {
    const BoundaryPatch& patch = p.domain().patches[pi];
    const bool lateral = patch.kind == PatchKind::Lateral;
    for (std::size_t q = 0; q < patch.nodes.size(); ++q) {
      const Vec3& x = patch.nodes[q];
      Vec3 w{}, dl{};
      std::array<double, 9> gd{};
      for (std::size_t k = 0; k < m; ++k) {
        pv[k] = vm[k].value(x, spec);
        for (int c = 0; c < 3; ++c) w[c] += s.c(k) * pv[k][c];
      }
      if (ext) {
        const auto& ps = ext->patch(pi);
        for (int c = 0; c < 3; ++c) dl[c] = A * ps.delta[c][q];
        for (int r = 0; r < 9; ++r) gd[r] = A * ps.grad[r][q];
      }
      for (const Vec3& tau : {patch.tau1, patch.tau2}) {
        const double ndt = n_D_tau(patch.normal, gd, tau);
        double coef = nu * ndt;  // from integrating nu div D(delta) by parts
        if (lateral) coef += -gamma * dot3(w, tau) - nu * ndt - gamma * dot3(dl, tau);
        else coef += -(cfg.b2_include_nu ? nu : 1.0) * ndt;
        for (std::size_t j = 0; j < m; ++j)
          rv(static_cast<Eigen::Index>(j)) += patch.weights[q] * coef * dot3(pv[j], tau);
      }
    }
  }
  return {rv, rt};
}

// ---------------------------------------------------------------------------

Stepper::Stepper(const Problem& p, double dt) : p_(&p), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
  g_ = 1.0 - 1.0 / std::sqrt(2.0);
  d_ = 1.0 - 1.0 / (2.0 * g_);
  Kv_ = p.forms().K_visc + p.forms().K_fric;
  Kt_ = p.forms().K_theta;
  const Eigen::Index m = Kv_.rows(), mt = Kt_.rows();
  Lv_.compute(Eigen::MatrixXd::Identity(m, m) + g_ * dt * Kv_);
  Lt_.compute(Eigen::MatrixXd::Identity(mt, mt) + g_ * dt * Kt_);
  if (Lv_.info() != Eigen::Success || Lt_.info() != Eigen::Success)
    throw std::runtime_error("stepper: implicit operator is not positive definite");
}

State Stepper::step(const State& s) const {
  const double dt = dt_, g = g_, dl = d_;
  const Eigen::VectorXd e1v = p_->explicit_velocity(s.t, s.c, s.d);
  const Eigen::VectorXd e1t = p_->explicit_temperature(s.t, s.c, s.d);
  const Eigen::VectorXd c2 = Lv_.solve(s.c + g * dt * e1v);
  const Eigen::VectorXd d2 = Lt_.solve(s.d + g * dt * e1t);
  const double t2 = s.t + g * dt;
  const Eigen::VectorXd e2v = p_->explicit_velocity(t2, c2, d2);
  const Eigen::VectorXd e2t = p_->explicit_temperature(t2, c2, d2);
  State out;
  out.t = s.t + dt;
  out.c = Lv_.solve(s.c + dt * (dl * e1v + (1.0 - dl) * e2v - (1.0 - g) * (Kv_ * c2)));
  out.d = Lt_.solve(s.d + dt * (dl * e1t + (1.0 - dl) * e2t - (1.0 - g) * (Kt_ * d2)));
  if (!finite(out.c) || !finite(out.d)) throw NumericalAbort(fmt::format("non-finite state at t = {:.6g}", out.t), s);
  return out;
}

Trajectory run_windows(const Problem& p, const State& init, double T, int windows, double dt, int sample_every) {
  if (!(T > 0.0)) throw std::invalid_argument("run: window length must be positive");
  if (windows < 1) throw std::invalid_argument("run: at least one window required");
  if (sample_every < 1) throw std::invalid_argument("run: sample cadence must be >= 1");
  const long spw = std::lround(T / dt);
  if (spw < 1) throw std::invalid_argument("run: window shorter than one step");
  const double h = T / static_cast<double>(spw);
  Stepper stepper(p, h);
  Trajectory tr;
  if (h > p.stability_dt())
    tr.warnings.push_back(fmt::format("dt = {:.3g} exceeds the advective estimate {:.3g}", h, p.stability_dt()));
  State s = init;
  s.t = 0.0;
  tr.samples.push_back(s);
  tr.window_start.push_back(0);
  for (int k = 0; k < windows; ++k) {
    for (long i = 1; i <= spw; ++i) {
      s = stepper.step(s);
      s.t = (static_cast<double>(k) * spw + i) * h;
      if (i % sample_every == 0 || i == spw) tr.samples.push_back(s);
    }
    tr.window_start.push_back(tr.samples.size() - 1);
  }
  return tr;
}

}  // namespace hopfflow
