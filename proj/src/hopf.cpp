#include "hopfflow/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace hopfflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Rows k: coefficient = sum_j M[k][j] f_j for cos(pi k (j+1/2)/N).
std::vector<double> dct_matrix(int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const double scale = (k == 0 ? 1.0 : 2.0) / n;
    for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(k) * n + j] = scale * std::cos(kPi * k * (j + 0.5) / n);
  }
  return m;
}

}  // namespace

double HopfParams::r() const { return rho * std::exp(-1.0 / eps); }

void validate(const HopfParams& p) {
  if (!(p.eps > 0.0) || !std::isfinite(p.eps)) throw std::invalid_argument("hopf: eps must be positive");
  if (!(p.rho > 0.0) || !(p.rho < 1.0)) throw std::invalid_argument("hopf: rho must lie in (0, 1)");
  if (!(p.c_cal > 0.0)) throw std::invalid_argument("hopf: c_cal must be positive");
}

double hopf_eta(double sigma, const HopfParams& p) {
  if (sigma <= p.r()) return 1.0;
  if (sigma >= p.rho) return 0.0;
  return -p.eps * std::log(sigma / p.rho);
}

EtaPrime hopf_eta_prime(double sigma, const HopfParams& p) {
  const double r = p.r();
  if (sigma == r || sigma == p.rho) return {-p.eps / sigma, true};
  if (sigma < r || sigma > p.rho) return {0.0, false};
  return {-p.eps / sigma, false};
}

HopfParams select_params(double nu, double d_tilde_norm, double c_cal) {
  if (!(d_tilde_norm > 0.0)) throw std::domain_error("hopf: flux norm must be positive for automatic parameters");
  if (!(nu > 0.0) || !(c_cal > 0.0)) throw std::domain_error("hopf: nu and c_cal must be positive");
  HopfParams p;
  p.c_cal = c_cal;
  p.eps = nu / (8.0 * c_cal * d_tilde_norm);
  p.rho = std::pow(p.eps, 6);
  if (!(p.rho < 1.0))
    throw std::domain_error(fmt::format("hopf: rho = {:.6g} >= 1; flux too small relative to nu, raise c_cal or set eps/rho", p.rho));
  const double lhs = smallness_lhs(p, d_tilde_norm);
  if (lhs > 0.25 * nu * (1.0 + 1e-12)) throw std::logic_error("hopf: smallness certificate violated after selection");
  return p;
}

double smallness_lhs(const HopfParams& p, double d_tilde_norm) {
  return p.c_cal * (p.eps + std::pow(p.rho, 1.0 / 6.0)) * d_tilde_norm;
}

// ---------------------------------------------------------------------------

double FluxProfile::amp_rate(double t) const {
  if (amplitude_rate) return amplitude_rate(t);
  if (!amplitude) return 0.0;
  return (amplitude(t + fd_dt) - amplitude(t - fd_dt)) / (2.0 * fd_dt);
}

bool FluxProfile::is_zero() const { return !amplitude || !shape1 || !shape2; }

FluxProfile make_flux_profile(const std::string& name, const DomainSpec& spec, const FluxOptions& opt) {
  FluxProfile f;
  f.name = name;
  if (name == "none") return f;
  if (!(opt.amplitude >= 0.0)) throw std::invalid_argument("flux: amplitude must be nonnegative");
  const double A = opt.amplitude;
  const double L1 = spec.L1, L2 = spec.L2;
  // Parabolic cap shape scaled to unit mean under the cap midpoint rule, so
  // the discrete fluxes through both caps agree exactly.
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < spec.N1; ++i) m1 += 4.0 * (i + 0.5) * (spec.N1 - i - 0.5) / (double(spec.N1) * spec.N1);
  for (int j = 0; j < spec.N2; ++j) m2 += 4.0 * (j + 0.5) * (spec.N2 - j - 0.5) / (double(spec.N2) * spec.N2);
  const double scale = double(spec.N1) * spec.N2 / (m1 * m2);
  auto parabolic = [L1, L2, scale](double x1, double x2) {
    return scale * (4.0 * x1 * (L1 - x1) / (L1 * L1)) * (4.0 * x2 * (L2 - x2) / (L2 * L2));
  };
  auto one = [](double, double) { return 1.0; };
  if (name == "constant") {
    f.shape1 = one;
    f.shape2 = one;
    f.amplitude = [A](double) { return A; };
    f.amplitude_rate = [](double) { return 0.0; };
  } else if (name == "parabolic-cap") {
    f.shape1 = parabolic;
    f.shape2 = one;
    f.amplitude = [A](double) { return A; };
    f.amplitude_rate = [](double) { return 0.0; };
  } else if (name == "pulsed") {
    if (!(opt.pulse >= 0.0 && opt.pulse < 1.0)) throw std::invalid_argument("flux: pulse depth must lie in [0, 1)");
    if (!(opt.period > 0.0)) throw std::invalid_argument("flux: pulse period must be positive");
    const double beta = opt.pulse, w = 2.0 * kPi / opt.period;
    f.shape1 = parabolic;
    f.shape2 = one;
    f.amplitude = [A, beta, w](double t) { return A * (1.0 + beta * std::sin(w * t)); };
    f.amplitude_rate = [A, beta, w](double t) { return A * beta * w * std::cos(w * t); };
  } else {
    throw std::invalid_argument(fmt::format("flux: unknown profile '{}'", name));
  }
  if (opt.outflow_scale != 1.0) {
    const double s = opt.outflow_scale;
    f.shape2 = [g = f.shape2, s](double x1, double x2) { return s * g(x1, x2); };
  }
  return f;
}

double check_compatibility(const FluxProfile& profile, const Domain& domain, double t) {
  if (profile.is_zero()) return 0.0;
  double in = 0.0, out = 0.0;
  const auto& lo = domain.lower_cap();
  const auto& up = domain.upper_cap();
  for (std::size_t q = 0; q < lo.nodes.size(); ++q) in += lo.weights[q] * profile.d1(lo.nodes[q][0], lo.nodes[q][1], t);
  for (std::size_t q = 0; q < up.nodes.size(); ++q) out += up.weights[q] * profile.d2(up.nodes[q][0], up.nodes[q][1], t);
  return std::abs(in - out) / std::max(1.0, in);
}

// ---------------------------------------------------------------------------

ExtendedFlux::ExtendedFlux(const FluxProfile& profile, const DomainSpec& spec) : profile_(profile), spec_(spec) {
  validate(spec);
  const int n1 = spec.N1, n2 = spec.N2;
  const std::size_t n = static_cast<std::size_t>(n1) * n2;
  cx1_.resize(n1);
  cx2_.resize(n2);
  for (int i = 0; i < n1; ++i) cx1_[i] = (i + 0.5) * spec.L1 / n1;
  for (int j = 0; j < n2; ++j) cx2_[j] = (j + 0.5) * spec.L2 / n2;
  const auto m1 = dct_matrix(n1);
  const auto m2 = dct_matrix(n2);
  for (int s = 0; s < 2; ++s) {
    coeffs_[s].assign(n, 0.0);
    node_vals_[s].assign(n, 0.0);
    node_dx1_[s].assign(n, 0.0);
    node_dx2_[s].assign(n, 0.0);
    if (profile_.is_zero()) continue;
    const auto& g = s == 0 ? profile_.shape1 : profile_.shape2;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const double v = g(cx1_[i], cx2_[j]);
        if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("flux: cap data must be finite and nonnegative");
        node_vals_[s][static_cast<std::size_t>(i) * n2 + j] = v;
      }
    // Separable transform: along x2 then x1.
    std::vector<double> tmp(n, 0.0);
    for (int i = 0; i < n1; ++i)
      for (int k = 0; k < n2; ++k) {
        double acc = 0.0;
        for (int j = 0; j < n2; ++j) acc += m2[static_cast<std::size_t>(k) * n2 + j] * node_vals_[s][static_cast<std::size_t>(i) * n2 + j];
        tmp[static_cast<std::size_t>(i) * n2 + k] = acc;
      }
    for (int k1 = 0; k1 < n1; ++k1)
      for (int k2 = 0; k2 < n2; ++k2) {
        double acc = 0.0;
        for (int i = 0; i < n1; ++i) acc += m1[static_cast<std::size_t>(k1) * n1 + i] * tmp[static_cast<std::size_t>(i) * n2 + k2];
        coeffs_[s][static_cast<std::size_t>(k1) * n2 + k2] = acc;
      }
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const auto gr = shape_grad(s, cx1_[i], cx2_[j]);
        node_dx1_[s][static_cast<std::size_t>(i) * n2 + j] = gr[0];
        node_dx2_[s][static_cast<std::size_t>(i) * n2 + j] = gr[1];
      }
  }
}

double ExtendedFlux::shape(int s, double x1, double x2) const {
  double acc = 0.0;
  for (int k1 = 0; k1 < spec_.N1; ++k1) {
    const double c1 = std::cos(kPi * k1 * x1 / spec_.L1);
    for (int k2 = 0; k2 < spec_.N2; ++k2) {
      const double c = coeff(s, k1, k2);
      if (c != 0.0) acc += c * c1 * std::cos(kPi * k2 * x2 / spec_.L2);
    }
  }
  return acc;
}

std::array<double, 2> ExtendedFlux::shape_grad(int s, double x1, double x2) const {
  std::array<double, 2> g{0.0, 0.0};
  for (int k1 = 0; k1 < spec_.N1; ++k1) {
    const double w1 = kPi * k1 / spec_.L1;
    const double c1 = std::cos(w1 * x1), s1 = std::sin(w1 * x1);
    for (int k2 = 0; k2 < spec_.N2; ++k2) {
      const double c = coeff(s, k1, k2);
      if (c == 0.0) continue;
      const double w2 = kPi * k2 / spec_.L2;
      g[0] -= c * w1 * s1 * std::cos(w2 * x2);
      g[1] -= c * w2 * c1 * std::sin(w2 * x2);
    }
  }
  return g;
}

double ExtendedFlux::shape_w1p(int s, double p) const {
  const double w = (spec_.L1 / spec_.N1) * (spec_.L2 / spec_.N2);
  double acc = 0.0;
  for (std::size_t q = 0; q < node_vals_[s].size(); ++q)
    acc += w * (std::pow(std::abs(node_vals_[s][q]), p) + std::pow(std::abs(node_dx1_[s][q]), p) +
                std::pow(std::abs(node_dx2_[s][q]), p));
  return acc;
}

double ExtendedFlux::w13inf_norm(double t) const {
  if (profile_.is_zero()) return 0.0;
  return std::abs(profile_.amp(t)) * std::cbrt(shape_w1p(0, 3.0) + shape_w1p(1, 3.0));
}

double ExtendedFlux::w13inf_norm_sup(double T, int samples) const {
  double best = w13inf_norm(0.0);
  for (int q = 1; q < samples; ++q) best = std::max(best, w13inf_norm(T * q / (samples - 1)));
  return best;
}

double ExtendedFlux::cap_sobolev_norm(int s, double p, double t) const {
  if (profile_.is_zero()) return 0.0;
  return std::abs(profile_.amp(t)) * std::pow(shape_w1p(s, p), 1.0 / p);
}

double ExtendedFlux::cap_sobolev_norm_rate(int s, double p, double t) const {
  if (profile_.is_zero()) return 0.0;
  return std::abs(profile_.amp_rate(t)) * std::pow(shape_w1p(s, p), 1.0 / p);
}

double ExtendedFlux::cap_lp_norm(int s, double p, double t) const {
  if (profile_.is_zero()) return 0.0;
  const double w = (spec_.L1 / spec_.N1) * (spec_.L2 / spec_.N2);
  double acc = 0.0;
  for (double v : node_vals_[s]) acc += w * std::pow(std::abs(v), p);
  return std::abs(profile_.amp(t)) * std::pow(acc, 1.0 / p);
}

// ---------------------------------------------------------------------------

ExtensionB::ExtensionB(const ExtendedFlux& flux, const HopfParams& params) : flux_(&flux), params_(params) {
  validate(params);
  if (!(params.rho < flux.spec().a))
    throw std::invalid_argument(fmt::format("hopf: rho = {:.6g} must be smaller than a = {:.6g}", params.rho, flux.spec().a));
}

double ExtensionB::alpha(const Vec3& x, double t) const {
  if (flux_->profile().is_zero()) return 0.0;
  const double a = flux_->spec().a;
  const double e1 = hopf_eta(x[2] + a, params_);
  const double e2 = hopf_eta(a - x[2], params_);
  double v = 0.0;
  if (e1 != 0.0) v += e1 * flux_->value(0, x, t);
  if (e2 != 0.0) v += e2 * flux_->value(1, x, t);
  return v;
}

double ExtensionB::div_b(const Vec3& x, double t) const {
  if (flux_->profile().is_zero()) return 0.0;
  const double a = flux_->spec().a;
  const double p1 = hopf_eta_prime(x[2] + a, params_).value;
  const double p2 = hopf_eta_prime(a - x[2], params_).value;
  double v = 0.0;
  if (p1 != 0.0) v += p1 * flux_->value(0, x, t);
  if (p2 != 0.0) v -= p2 * flux_->value(1, x, t);
  return v;
}

ScalarField ExtensionB::sample_alpha(const QuadratureGrid& grid, double t) const {
  return ScalarField::sample(grid, [&](const Vec3& x) { return alpha(x, t); });
}

ScalarField ExtensionB::sample_div_b(const QuadratureGrid& grid, double t) const {
  return ScalarField::sample(grid, [&](const Vec3& x) { return div_b(x, t); });
}

bool ExtensionB::in_support(const Vec3& x) const { return dist_to_caps(x[2], flux_->spec()) <= params_.rho; }

}  // namespace hopfflow
