#include "hopfflow/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <fmt/format.h>

#include "hopfflow/norms.hpp"

namespace hopfflow {

namespace {

double ei(double x) { return boost::math::expint(x); }

// int_0^z eta(s) ds.
double eta_integral(double z, const HopfParams& p) {
  const double r = p.r();
  if (z <= r) return z;
  const double u = std::min(z, p.rho);
  auto prim = [&](double s) { return -p.eps * (s * std::log(s / p.rho) - s); };
  return r + prim(u) - prim(r);
}

double l2_nodes(const QuadratureGrid& grid, const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc * grid.weight());
}

}  // namespace

NeumannSolution solve_neumann(const SpectralTransform& tr, const ScalarField& div_b, double tol) {
  div_b.check();
  const QuadratureGrid& grid = tr.grid();
  if (div_b.grid != &grid) throw std::invalid_argument("poisson: field grid does not match transform");
  double mean = 0.0, l1 = 0.0;
  for (double v : div_b.values) {
    mean += v;
    l1 += std::abs(v);
  }
  mean *= grid.weight();
  l1 *= grid.weight();
  if (std::abs(mean) > tol * std::max(l1, 1e-300))
    throw SolvabilityError(fmt::format("poisson: int div b = {:.3e} violates Neumann solvability", mean));

  auto coeffs = tr.forward(div_b.values, kAllCos);
  const int n1 = grid.n(0), n2 = grid.n(1), n3 = grid.n(2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k) {
        const double w1 = tr.wavenumber(0, i, Parity::Cos);
        const double w2 = tr.wavenumber(1, j, Parity::Cos);
        const double w3 = tr.wavenumber(2, k, Parity::Cos);
        const double lam = w1 * w1 + w2 * w2 + w3 * w3;
        double& c = coeffs[grid.index(i, j, k)];
        c = lam > 0.0 ? c / lam : 0.0;
      }

  NeumannSolution sol;
  sol.phi.grid = &grid;
  sol.phi.values = tr.inverse(coeffs, kAllCos);
  sol.phi.spectral = SpectralData{kAllCos, std::move(coeffs)};
  for (int a = 0; a < 3; ++a) {
    sol.grad_phi.comp[a] = derivative(tr, sol.phi, a);
    for (int b = 0; b < 3; ++b) sol.hessian[3 * a + b] = derivative(tr, sol.grad_phi.comp[a], b);
  }
  std::vector<double> res(div_b.size());
  for (std::size_t q = 0; q < res.size(); ++q)
    res[q] = sol.hessian[0].values[q] + sol.hessian[4].values[q] + sol.hessian[8].values[q] + div_b.values[q];
  sol.residual = l2_nodes(grid, res);
  return sol;
}

LayerProfile layer_profile(double lambda, double z, double ell, const HopfParams& p) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson: layer profile needs lambda > 0");
  if (lambda * ell > 600.0) throw std::domain_error("poisson: layer profile wavenumber too large");
  z = std::clamp(z, 0.0, ell);
  const double eps = p.eps, rho = p.rho, r = p.r();
  const double E = std::exp(-lambda * ell);
  const double den = 1.0 - E * E;
  double P = 0.0, Qs = 0.0;  // Qs = Q / sinh(lambda ell)
  if (z > r) {
    const double u = std::min(z, rho);
    P = -0.5 * eps * (ei(lambda * u) - ei(lambda * r) + ei(-lambda * u) - ei(-lambda * r));
  }
  if (z < rho) {
    const double l = std::max(z, r);
    const double dm = ei(-lambda * rho) - ei(-lambda * l);
    const double dp = ei(lambda * rho) - ei(lambda * l);
    Qs = -eps * (dm + E * E * dp) / den;
  }
  const double ez = std::exp(-lambda * z);
  const double epz = std::exp(lambda * z);
  // cosh(lambda (ell - z)) / sinh(lambda ell) and sinh(lambda (ell - z)) / sinh(lambda ell).
  const double ch_ratio = (ez + E * E * epz) / den;
  const double sh_ratio = (ez - E * E * epz) / den;
  LayerProfile out;
  out.h = (ch_ratio * P + std::cosh(lambda * z) * Qs) / lambda;
  out.hp = -sh_ratio * P + std::sinh(lambda * z) * Qs;
  const double q = hopf_eta_prime(z, p).value;
  out.hpp = lambda * lambda * out.h - q;
  return out;
}

// ---------------------------------------------------------------------------

HopfExtension::HopfExtension(const ExtendedFlux& flux, const HopfParams& params, const Domain& domain)
    : flux_(&flux), params_(params), ell_(domain.spec.height()) {
  validate(params);
  if (!(params.rho < domain.spec.a))
    throw std::invalid_argument(fmt::format("hopf: rho = {:.6g} must be smaller than a = {:.6g}", params.rho, domain.spec.a));
  const DomainSpec& s = flux.spec();
  double scale = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int k1 = 0; k1 < s.N1; ++k1)
      for (int k2 = 0; k2 < s.N2; ++k2) scale = std::max(scale, std::abs(flux.coeff(i, k1, k2)));
  for (int k1 = 0; k1 < s.N1; ++k1)
    for (int k2 = 0; k2 < s.N2; ++k2) {
      const double D1 = flux.coeff(0, k1, k2), D2 = flux.coeff(1, k1, k2);
      if (std::max(std::abs(D1), std::abs(D2)) <= 1e-15 * scale) continue;
      Mode m;
      m.k1 = k1;
      m.k2 = k2;
      m.kap1 = std::numbers::pi * k1 / s.L1;
      m.kap2 = std::numbers::pi * k2 / s.L2;
      m.lambda = std::hypot(m.kap1, m.kap2);
      m.D1 = D1;
      m.D2 = D2;
      modes_.push_back(m);
    }

  std::vector<Vec3> pts(domain.grid.size());
  for (std::size_t q = 0; q < pts.size(); ++q) pts[q] = domain.grid.point(q);
  volume_ = evaluate(pts);
  for (const auto& patch : domain.patches) patches_.push_back(evaluate(patch.nodes));
}

ExtensionSamples HopfExtension::evaluate(const std::vector<Vec3>& points) const {
  const double a = 0.5 * ell_;
  const std::size_t n = points.size();
  ExtensionSamples out;
  out.points = points;
  for (auto& v : out.delta) v.assign(n, 0.0);
  for (auto& v : out.grad) v.assign(n, 0.0);
  for (auto& v : out.grad_b3) v.assign(n, 0.0);
  out.b3.assign(n, 0.0);
  out.phi.assign(n, 0.0);
  if (flux_->profile().is_zero()) return out;

  // Layer profiles per distinct height, signed combination D1 h1(z) - D2 h1(ell - z).
  std::map<double, std::vector<std::array<double, 3>>> table;
  for (const auto& x : points) {
    const double z = std::clamp(x[2] + a, 0.0, ell_);
    if (table.count(z)) continue;
    std::vector<std::array<double, 3>> row(modes_.size());
    for (std::size_t m = 0; m < modes_.size(); ++m) {
      const Mode& md = modes_[m];
      if (md.lambda == 0.0) continue;
      const LayerProfile lo = layer_profile(md.lambda, z, ell_, params_);
      const LayerProfile hi = layer_profile(md.lambda, ell_ - z, ell_, params_);
      row[m] = {md.D1 * lo.h - md.D2 * hi.h, md.D1 * lo.hp + md.D2 * hi.hp, md.D1 * lo.hpp - md.D2 * hi.hpp};
    }
    table.emplace(z, std::move(row));
  }

  const double m1 = flux_->mean(0), m2 = flux_->mean(1);
  const double ieta_ell = eta_integral(ell_, params_);
  for (std::size_t q = 0; q < n; ++q) {
    const Vec3& x = points[q];
    const double z = std::clamp(x[2] + a, 0.0, ell_);
    const auto& row = table.at(z);
    const double e1 = hopf_eta(z, params_), e2 = hopf_eta(ell_ - z, params_);
    const double ep1 = hopf_eta_prime(z, params_).value, ep2 = hopf_eta_prime(ell_ - z, params_).value;

    double phi = 0, p1 = 0, p2 = 0, p3 = 0, p11 = 0, p12 = 0, p22 = 0, p13 = 0, p23 = 0, p33 = 0;
    double g1 = 0, g1x = 0, g1y = 0, g2 = 0, g2x = 0, g2y = 0;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
      const Mode& md = modes_[m];
      const double c1 = std::cos(md.kap1 * x[0]), s1 = std::sin(md.kap1 * x[0]);
      const double c2 = std::cos(md.kap2 * x[1]), s2 = std::sin(md.kap2 * x[1]);
      const double C = c1 * c2;
      const double Sx = -md.kap1 * s1 * c2, Sy = -md.kap2 * c1 * s2;
      g1 += md.D1 * C;
      g1x += md.D1 * Sx;
      g1y += md.D1 * Sy;
      g2 += md.D2 * C;
      g2x += md.D2 * Sx;
      g2y += md.D2 * Sy;
      if (md.lambda == 0.0) continue;
      const auto& H = row[m];
      phi += C * H[0];
      p1 += Sx * H[0];
      p2 += Sy * H[0];
      p3 += C * H[1];
      p11 -= md.kap1 * md.kap1 * C * H[0];
      p22 -= md.kap2 * md.kap2 * C * H[0];
      p12 += md.kap1 * md.kap2 * s1 * s2 * H[0];
      p13 += Sx * H[1];
      p23 += Sy * H[1];
      p33 += C * H[2];
    }
    // Cross-section mean: plug flow m1 carried between the layers.
    phi += m1 * (z - eta_integral(z, params_)) - m2 * (ieta_ell - eta_integral(ell_ - z, params_));
    p3 += m1 * (1.0 - e1) - m2 * e2;
    p33 += -m1 * ep1 + m2 * ep2;

    const double b3 = g1 * e1 + g2 * e2;
    const double b31 = g1x * e1 + g2x * e2;
    const double b32 = g1y * e1 + g2y * e2;
    const double b33 = g1 * ep1 - g2 * ep2;
    out.phi[q] = phi;
    out.b3[q] = b3;
    out.grad_b3[0][q] = b31;
    out.grad_b3[1][q] = b32;
    out.grad_b3[2][q] = b33;
    out.delta[0][q] = p1;
    out.delta[1][q] = p2;
    out.delta[2][q] = b3 + p3;
    const std::array<double, 9> g{p11, p12, p13, p12, p22, p23, b31 + p13, b32 + p23, b33 + p33};
    for (int c = 0; c < 9; ++c) out.grad[c][q] = g[c];
  }
  return out;
}

NeumannSolution HopfExtension::solution(const QuadratureGrid& grid, double t) const {
  if (grid.size() != volume_.size()) throw std::invalid_argument("poisson: grid does not match extension samples");
  const double A = amp(t);
  NeumannSolution sol;
  sol.phi = ScalarField::zeros(grid);
  double mean = 0.0;
  for (double v : volume_.phi) mean += v;
  mean /= static_cast<double>(volume_.size());
  for (std::size_t q = 0; q < grid.size(); ++q) sol.phi.values[q] = A * (volume_.phi[q] - mean);
  for (int i = 0; i < 3; ++i) {
    sol.grad_phi.comp[i] = ScalarField::zeros(grid);
    for (std::size_t q = 0; q < grid.size(); ++q)
      sol.grad_phi.comp[i].values[q] = A * (volume_.delta[i][q] - (i == 2 ? volume_.b3[q] : 0.0));
    for (int j = 0; j < 3; ++j) {
      auto& h = sol.hessian[3 * i + j];
      h = ScalarField::zeros(grid);
      for (std::size_t q = 0; q < grid.size(); ++q)
        h.values[q] = A * (volume_.grad[3 * i + j][q] - (i == 2 ? volume_.grad_b3[j][q] : 0.0));
    }
  }
  std::vector<double> div(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q)
    div[q] = A * (volume_.grad[0][q] + volume_.grad[4][q] + volume_.grad[8][q]);
  sol.residual = l2_nodes(grid, div);
  return sol;
}

double HopfExtension::divergence_ratio(const QuadratureGrid& grid) const {
  std::vector<double> div(volume_.size());
  double h1 = 0.0;
  for (std::size_t q = 0; q < div.size(); ++q) {
    div[q] = volume_.grad[0][q] + volume_.grad[4][q] + volume_.grad[8][q];
    h1 += volume_.b3[q] * volume_.b3[q];
    for (int j = 0; j < 3; ++j) h1 += volume_.grad_b3[j][q] * volume_.grad_b3[j][q];
  }
  h1 = std::sqrt(h1 * grid.weight());
  if (h1 == 0.0) return 0.0;
  return l2_nodes(grid, div) / h1;
}

double HopfExtension::trace_error(const Domain& domain) const {
  double err = 0.0, scale = 1.0;
  for (std::size_t p = 0; p < domain.patches.size(); ++p) {
    const BoundaryPatch& patch = domain.patches[p];
    const ExtensionSamples& s = patches_[p];
    for (std::size_t q = 0; q < s.size(); ++q) {
      const double dn = s.delta[0][q] * patch.normal[0] + s.delta[1][q] * patch.normal[1] + s.delta[2][q] * patch.normal[2];
      double target = 0.0;
      if (patch.kind == PatchKind::LowerCap) {
        const double d = flux_->shape(0, s.points[q][0], s.points[q][1]);
        target = -d;
        scale = std::max(scale, d);
      } else if (patch.kind == PatchKind::UpperCap) {
        const double d = flux_->shape(1, s.points[q][0], s.points[q][1]);
        target = d;
        scale = std::max(scale, d);
      }
      err = std::max(err, std::abs(dn - target));
    }
  }
  return err / scale;
}

// ---------------------------------------------------------------------------

Lemma22Ratio HopfExtension::lemma22_ratio(double p, double mu) const {
  if (!(p >= 2.0)) throw std::domain_error("lemma 2.2 certificate needs p >= 2");
  if (!(mu > 2.0 / 3.0))
    throw std::domain_error("mu must exceed 2/3: for mu = 2/3 the layer integral of sigma^{3mu-3} is not finite");
  if (!(mu < 1.0)) throw std::domain_error("mu must lie below 1");
  Lemma22Ratio out;
  if (flux_->profile().is_zero()) return out;
  const double a = 0.5 * ell_, r = params_.r(), rho = params_.rho;

  // Distances to the nearer cap with their weights over (0, a].
  using GL = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> sig, wsig;
  auto linear = [&](double lo, double hi) {
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < x.size(); ++i) {
      sig.push_back(c + h * x[i]);
      wsig.push_back(h * w[i]);
      if (x[i] != 0.0) {
        sig.push_back(c - h * x[i]);
        wsig.push_back(h * w[i]);
      }
    }
  };
  auto logarithmic = [&](double lo, double hi) {
    const double u0 = std::log(lo), u1 = std::log(hi);
    const int panels = std::max(1, static_cast<int>(std::ceil((u1 - u0) / 1.0)));
    const std::size_t first = sig.size();
    for (int k = 0; k < panels; ++k) linear(u0 + (u1 - u0) * k / panels, u0 + (u1 - u0) * (k + 1) / panels);
    for (std::size_t i = first; i < sig.size(); ++i) {
      sig[i] = std::exp(sig[i]);
      wsig[i] *= sig[i];
    }
  };
  if (r > 0.0) linear(0.0, r);
  logarithmic(r > 0.0 ? r : rho * 1e-300, std::min(rho, a));
  if (rho < a) logarithmic(rho, a);
  out.nodes_z = static_cast<int>(sig.size());

  // Mode factors on the cap midpoint nodes.
  const int n1 = flux_->spec().N1, n2 = flux_->spec().N2;
  const double L1 = flux_->spec().L1, L2 = flux_->spec().L2;
  const std::size_t nc = static_cast<std::size_t>(n1) * n2, nm = modes_.size();
  const double wcap = L1 * L2 / static_cast<double>(nc);
  std::vector<double> C(nc * nm), Sx(nc * nm), Sy(nc * nm), SS(nc * nm);
  std::vector<double> g1(nc, 0.0), g2(nc, 0.0);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * n2 + j;
      const double x1 = (i + 0.5) * L1 / n1, x2 = (j + 0.5) * L2 / n2;
      for (std::size_t m = 0; m < nm; ++m) {
        const Mode& md = modes_[m];
        const double c1 = std::cos(md.kap1 * x1), s1 = std::sin(md.kap1 * x1);
        const double c2 = std::cos(md.kap2 * x2), s2 = std::sin(md.kap2 * x2);
        C[q * nm + m] = c1 * c2;
        Sx[q * nm + m] = -md.kap1 * s1 * c2;
        Sy[q * nm + m] = -md.kap2 * c1 * s2;
        SS[q * nm + m] = md.kap1 * md.kap2 * s1 * s2;
        g1[q] += md.D1 * c1 * c2;
        g2[q] += md.D2 * c1 * c2;
      }
    }

  const double m1 = flux_->mean(0), m2 = flux_->mean(1);
  double num = 0.0, den = 0.0;
  std::vector<std::array<double, 3>> H(nm);
  for (int side = 0; side < 2; ++side) {
    for (std::size_t iz = 0; iz < sig.size(); ++iz) {
      // side 0: z = sigma from the lower cap, side 1: ell - z = sigma.
      const double s = sig[iz], o = ell_ - s;
      const double zlo = side == 0 ? s : o, zhi = side == 0 ? o : s;
      for (std::size_t m = 0; m < nm; ++m) {
        const Mode& md = modes_[m];
        if (md.lambda == 0.0) {
          H[m] = {0.0, 0.0, 0.0};
          continue;
        }
        const LayerProfile lo = layer_profile(md.lambda, zlo, ell_, params_);
        const LayerProfile hi = layer_profile(md.lambda, zhi, ell_, params_);
        H[m] = {md.D1 * lo.h - md.D2 * hi.h, md.D1 * lo.hp + md.D2 * hi.hp, md.D1 * lo.hpp - md.D2 * hi.hpp};
      }
      const double ep1 = hopf_eta_prime(zlo, params_).value, ep2 = hopf_eta_prime(zhi, params_).value;
      const double wp = std::pow(wsig[iz] * wcap, 1.0 / p) * std::pow(s, mu);
      for (std::size_t q = 0; q < nc; ++q) {
        double p11 = 0, p22 = 0, p12 = 0, p13 = 0, p23 = 0, p33 = 0;
        for (std::size_t m = 0; m < nm; ++m) {
          const Mode& md = modes_[m];
          const double c = C[q * nm + m];
          p11 -= md.kap1 * md.kap1 * c * H[m][0];
          p22 -= md.kap2 * md.kap2 * c * H[m][0];
          p12 += SS[q * nm + m] * H[m][0];
          p13 += Sx[q * nm + m] * H[m][1];
          p23 += Sy[q * nm + m] * H[m][1];
          p33 += c * H[m][2];
        }
        p33 += -m1 * ep1 + m2 * ep2;
        const double hess = std::sqrt(p11 * p11 + p22 * p22 + p33 * p33 + 2.0 * (p12 * p12 + p13 * p13 + p23 * p23));
        const double divb = g1[q] * ep1 - g2[q] * ep2;
        // Scale before raising to p: hess ~ eps / sigma overflows when cubed deep in the layer.
        num += std::pow(hess * wp, p);
        den += std::pow(std::abs(divb) * wp, p);
      }
    }
  }
  out.hessian = std::pow(num, 1.0 / p);
  out.div_b = std::pow(den, 1.0 / p);
  out.ratio = out.div_b > 0.0 ? out.hessian / out.div_b : 0.0;
  return out;
}

double certify_lemma22(const ScalarField& div_b, const NeumannSolution& sol, double p, double mu) {
  if (!(p >= 2.0)) throw std::domain_error("lemma 2.2 certificate needs p >= 2");
  if (!(mu > 0.0 && mu < 1.0)) throw std::domain_error("lemma 2.2 certificate needs mu in (0, 1)");
  const double den = norm(div_b, NormSpec::WeightedLp(p, mu));
  if (!(den > 0.0)) throw std::domain_error("lemma 2.2 certificate: div b vanishes");
  const double num = norm(std::span<const ScalarField>(sol.hessian.data(), sol.hessian.size()), NormSpec::WeightedLp(p, mu));
  return num / den;
}

Certificate319 certify_319(const ExtendedFlux& flux, const HopfParams& params, double mu, double t) {
  if (!(mu > 2.0 / 3.0))
    throw std::domain_error("mu must exceed 2/3: for mu = 2/3 the layer integral of sigma^{3mu-3} is not finite");
  if (!(mu < 1.0)) throw std::domain_error("mu must lie below 1");
  validate(params);
  Certificate319 c;
  if (flux.profile().is_zero()) return c;
  const double r = params.r(), rho = params.rho, eps = params.eps;
  const double e = 3.0 * mu - 2.0;
  const double layer = eps * eps * eps * (std::pow(rho, e) - std::pow(r, e)) / e;
  const double cap = std::pow(flux.cap_lp_norm(0, 3.0, t), 3) + std::pow(flux.cap_lp_norm(1, 3.0, t), 3);
  c.lhs = std::cbrt(cap * layer);
  c.rhs = eps * std::pow(rho, mu - 2.0 / 3.0) * (flux.cap_lp_norm(0, 3.0, t) + flux.cap_lp_norm(1, 3.0, t));
  c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : 0.0;
  return c;
}

}  // namespace hopfflow
