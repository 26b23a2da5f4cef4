#include "doctest.h"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hopfflow/norms.hpp"
#include "hopfflow/poisson.hpp"

using namespace hopfflow;

namespace {
DomainSpec box(int n = 16, int n3 = 32) {
  DomainSpec s;
  s.L1 = 1.0;
  s.L2 = 1.2;
  s.a = 0.5;
  s.N1 = n;
  s.N2 = n;
  s.N3 = n3;
  return s;
}
HopfParams params(double eps, double rho) {
  HopfParams h;
  h.eps = eps;
  h.rho = rho;
  return h;
}
}  // namespace

TEST_CASE("manufactured cosine eigenmode is recovered") {
  const DomainSpec s = box(12, 16);
  const Domain d = build_domain(s);
  const SpectralTransform tr(d.grid);
  const double k1 = M_PI / s.L1, k2 = 2 * M_PI / s.L2, k3 = 3 * M_PI / (2 * s.a);
  auto exact = [&](const Vec3& x) { return std::cos(k1 * x[0]) * std::cos(k2 * x[1]) * std::cos(k3 * (x[2] + s.a)); };
  const double lap = k1 * k1 + k2 * k2 + k3 * k3;
  const ScalarField rhs = ScalarField::sample(d.grid, [&](const Vec3& x) { return lap * exact(x); });
  const NeumannSolution sol = solve_neumann(tr, rhs);
  double err = 0.0, ref = 0.0;
  for (std::size_t q = 0; q < d.grid.size(); ++q) {
    err = std::max(err, std::abs(sol.phi.values[q] - exact(d.grid.point(q))));
    ref = std::max(ref, std::abs(exact(d.grid.point(q))));
  }
  CHECK(err / ref <= 1e-12);
  CHECK(sol.residual <= 1e-10);
  // d^2 phi / dx1 dx3 against the closed form.
  for (std::size_t q = 0; q < d.grid.size(); q += 97) {
    const Vec3 x = d.grid.point(q);
    const double h13 = k1 * k3 * std::sin(k1 * x[0]) * std::cos(k2 * x[1]) * std::sin(k3 * (x[2] + s.a));
    CHECK(std::abs(sol.hessian[2].values[q] - h13) <= 1e-10 * lap);
  }
}

TEST_CASE("nonzero-mean data are rejected") {
  const Domain d = build_domain(box(8, 8));
  const SpectralTransform tr(d.grid);
  const ScalarField rhs = ScalarField::sample(d.grid, [](const Vec3& x) { return 1.0 + std::cos(M_PI * x[0]); });
  CHECK_THROWS_AS(solve_neumann(tr, rhs), SolvabilityError);
}

TEST_CASE("layer profile matches a Green's function quadrature") {
  // h(z) = int G(z, s) f(s) ds with G = cosh(lam z<) cosh(lam (ell - z>)) / (lam sinh(lam ell)),
  // f = eta', which solves h'' - lam^2 h = -f with h'(0) = h'(ell) = 0.
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const HopfParams h = params(0.4, 0.3);
  const double ell = 1.0, r = h.r();
  for (double lam : {0.7, 3.0, 11.0}) {
    for (double z : {0.01, 0.05, 0.2, 0.3, 0.6, 0.95}) {
      const double den = lam * std::sinh(lam * ell);
      auto f = [&](double s) { return hopf_eta_prime(s, h).value; };
      auto below = [&](double s) { return std::cosh(lam * s) * f(s); };
      auto above = [&](double s) { return std::cosh(lam * (ell - s)) * f(s); };
      double lo = 0.0, hi = 0.0;
      if (z > r) lo = GK::integrate(below, r, std::min(z, h.rho), 15, 1e-14);
      if (z < h.rho) hi = GK::integrate(above, std::max(z, r), h.rho, 15, 1e-14);
      const double oracle = (std::cosh(lam * (ell - z)) * lo + std::cosh(lam * z) * hi) / den;
      const double oracle_p = (-lam * std::sinh(lam * (ell - z)) * lo + lam * std::sinh(lam * z) * hi) / den;
      const LayerProfile p = layer_profile(lam, z, ell, h);
      CHECK(p.h == doctest::Approx(oracle).epsilon(1e-10));
      CHECK(p.hp == doctest::Approx(oracle_p).epsilon(1e-10).scale(1.0));
      CHECK(p.hpp == doctest::Approx(lam * lam * p.h - f(z)).epsilon(1e-12));
    }
  }
}

TEST_CASE("extension is divergence free with the prescribed cap flux") {
  for (const char* name : {"constant", "parabolic-cap", "pulsed"}) {
    const DomainSpec s = box();
    const Domain d = build_domain(s);
    const ExtendedFlux f(make_flux_profile(name, s, FluxOptions{}), s);
    const HopfExtension ext(f, params(0.5, 0.2), d);
    CHECK(ext.divergence_ratio(d.grid) <= 1e-10);
    CHECK(ext.trace_error(d) <= 1e-8);
  }
}

TEST_CASE("lemma 2.2 ratio: exact for a uniform flux, finite otherwise, and rejects mu = 2/3") {
  const DomainSpec s = box();
  const Domain d = build_domain(s);
  const ExtendedFlux uniform(make_flux_profile("constant", s, FluxOptions{}), s);
  // Uniform data: only the x3 profile is present and phi_33 = -div b pointwise.
  const HopfExtension e1(uniform, params(0.5, 0.2), d);
  CHECK(e1.lemma22_ratio(3.0, 0.8).ratio == doctest::Approx(1.0).epsilon(1e-10));
  const ExtendedFlux para(make_flux_profile("parabolic-cap", s, FluxOptions{}), s);
  const HopfExtension e2(para, params(0.5, 0.2), d);
  const Lemma22Ratio l = e2.lemma22_ratio(3.0, 0.8);
  CHECK(std::isfinite(l.ratio));
  CHECK(l.ratio > 1.0);
  CHECK_THROWS_WITH_AS(e2.lemma22_ratio(3.0, 2.0 / 3.0), doctest::Contains("not finite"), std::domain_error);
}

TEST_CASE("graded lemma 2.2 quadrature agrees with the grid evaluation when the layer is resolved") {
  const DomainSpec s = box(16, 256);
  const Domain d = build_domain(s);
  const ExtendedFlux para(make_flux_profile("parabolic-cap", s, FluxOptions{}), s);
  const HopfParams h = params(0.6, 0.4);
  const HopfExtension ext(para, h, d);
  const ExtensionB b(para, h);
  const double grid = certify_lemma22(b.sample_div_b(d.grid, 0.0), ext.solution(d.grid, 0.0), 3.0, 0.8);
  const double graded = ext.lemma22_ratio(3.0, 0.8).ratio;
  CHECK(graded == doctest::Approx(grid).epsilon(0.05));
}

TEST_CASE("estimate (3.19) layer factorization") {
  const DomainSpec s = box();
  const ExtendedFlux para(make_flux_profile("parabolic-cap", s, FluxOptions{}), s);
  const Certificate319 c = certify_319(para, params(0.5, 0.2), 0.8, 0.0);
  CHECK(c.lhs > 0.0);
  CHECK(std::isfinite(c.ratio));
  CHECK_THROWS_WITH_AS(certify_319(para, params(0.5, 0.2), 2.0 / 3.0, 0.0), doctest::Contains("not finite"), std::domain_error);
}
