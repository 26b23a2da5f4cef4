#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "hopfflow/basis.hpp"

using namespace hopfflow;

namespace {
DomainSpec box() {
  DomainSpec s;
  s.L1 = 1.0;
  s.L2 = 1.3;
  s.a = 0.5;
  s.N1 = 16;
  s.N2 = 16;
  s.N3 = 32;
  return s;
}
}  // namespace

TEST_CASE("dealiased band") {
  const auto k = dealiased_band(box());
  CHECK(k[0] == 10);
  CHECK(k[1] == 10);
  CHECK(k[2] == 21);
}

TEST_CASE("one-dimensional trig integrals") {
  const TrigFactor c2{false, 2, 1.5}, c0{false, 0, 1.5}, s1{true, 1, 1.5}, s3{true, 3, 1.5};
  CHECK(integrate_1d(c2, c2) == doctest::Approx(0.75));
  CHECK(integrate_1d(c0, c0) == doctest::Approx(1.5));
  CHECK(integrate_1d(s1, s1) == doctest::Approx(0.75));
  CHECK(std::abs(integrate_1d(s1, s3)) < 1e-15);
  // int_0^L sin(pi s / L) ds = 2 L / pi.
  CHECK(integrate_1d(s1, c0) == doctest::Approx(2 * 1.5 / M_PI));
}

TEST_CASE("velocity modes are solenoidal with zero normal trace") {
  const DomainSpec s = box();
  const VelocityBasis vb = build_velocity_basis(s, 32, {0.5, 0.3});
  REQUIRE(vb.size() == 32);
  CHECK(vb.gram_error <= 1e-10);
  const Domain d = build_domain(s);
  for (const auto& m : vb.modes) {
    CHECK(std::abs(m.amp[0] * M_PI * m.k[0] / s.L1 + m.amp[1] * M_PI * m.k[1] / s.L2 + m.amp[2] * M_PI * m.k[2] / (2 * s.a)) < 1e-12);
    for (std::size_t q = 0; q < d.grid.size(); q += 131) {
      const auto g = m.grad(d.grid.point(q), s);
      CHECK(std::abs(g[0] + g[4] + g[8]) <= 1e-12);
    }
    for (const auto& p : d.patches)
      for (std::size_t q = 0; q < p.nodes.size(); q += 17) {
        const Vec3 v = m.value(p.nodes[q], s);
        CHECK(std::abs(v[0] * p.normal[0] + v[1] * p.normal[1] + v[2] * p.normal[2]) <= 1e-12);
      }
  }
  for (std::size_t i = 1; i < vb.size(); ++i) CHECK(vb.modes[i].rayleigh >= vb.modes[i - 1].rayleigh - 1e-12);
}

TEST_CASE("too many modes for the band are refused") {
  DomainSpec s = box();
  s.N1 = s.N2 = s.N3 = 4;
  CHECK_THROWS_AS(build_velocity_basis(s, 500, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_temperature_basis(s, 500), std::invalid_argument);
}

TEST_CASE("temperature basis: constant first, Neumann eigenvalues in order") {
  const DomainSpec s = box();
  const TemperatureBasis tb = build_temperature_basis(s, 12);
  CHECK(tb.gram_error <= 1e-10);
  CHECK(tb.modes[0].eigenvalue == 0.0);
  CHECK(tb.modes[0].amp == doctest::Approx(1.0 / std::sqrt(1.3)));
  CHECK(tb.modes[1].eigenvalue == doctest::Approx(std::pow(M_PI / 1.3, 2)));
  const VelocityBasis vb = build_velocity_basis(s, 4, {1.0, 1.0});
  const AssembledForms f = assemble_forms(vb, tb, 1.0, 1.0, 0.7);
  for (std::size_t i = 0; i < tb.size(); ++i) {
    CHECK(f.K_theta(i, i) == doctest::Approx(0.7 * tb.modes[i].eigenvalue));
    CHECK(f.G_temp(i, i) == doctest::Approx(tb.modes[i].eigenvalue));
    if (i > 0) CHECK(tb.modes[i].eigenvalue >= tb.modes[i - 1].eigenvalue);
  }
}

TEST_CASE("viscous and friction forms against nodal quadrature") {
  // Independent check: (nu/2) int D:D and gamma int_{S1} (psi . tau)(psi . tau)
  // from point values on a fine midpoint grid.
  DomainSpec s = box();
  s.N1 = 24;
  s.N2 = 24;
  s.N3 = 48;
  const double nu = 0.5, gamma = 0.3;
  const VelocityBasis vb = build_velocity_basis(s, 10, {nu, gamma});
  const TemperatureBasis tb = build_temperature_basis(s, 2);
  const AssembledForms f = assemble_forms(vb, tb, nu, gamma, 1.0);
  const Domain d = build_domain(s);
  for (std::size_t i = 0; i < vb.size(); i += 3)
    for (std::size_t j = 0; j < vb.size(); j += 2) {
      double visc = 0.0;
      for (std::size_t q = 0; q < d.grid.size(); ++q) {
        const Vec3 x = d.grid.point(q);
        const auto gi = vb.modes[i].grad(x, s), gj = vb.modes[j].grad(x, s);
        double dd = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) dd += (gi[3 * a + b] + gi[3 * b + a]) * (gj[3 * a + b] + gj[3 * b + a]);
        visc += 0.5 * nu * dd * d.grid.weight();
      }
      double fric = 0.0;
      for (int p = 0; p < 4; ++p) {
        const BoundaryPatch& bp = d.patches[p];
        for (std::size_t q = 0; q < bp.nodes.size(); ++q) {
          const Vec3 vi = vb.modes[i].value(bp.nodes[q], s), vj = vb.modes[j].value(bp.nodes[q], s);
          for (const Vec3& t : {bp.tau1, bp.tau2}) {
            const double ti = vi[0] * t[0] + vi[1] * t[1] + vi[2] * t[2];
            const double tj = vj[0] * t[0] + vj[1] * t[1] + vj[2] * t[2];
            fric += gamma * ti * tj * bp.weights[q];
          }
        }
      }
      CHECK(f.K_visc(i, j) == doctest::Approx(visc).epsilon(1e-10).scale(1.0));
      CHECK(f.K_fric(i, j) == doctest::Approx(fric).epsilon(1e-10).scale(1.0));
      CHECK(viscous_entry(vb.modes[i], vb.modes[j], s, nu) == doctest::Approx(f.K_visc(i, j)));
    }
}

TEST_CASE("viscous plus friction form is positive definite") {
  const DomainSpec s = box();
  const VelocityBasis vb = build_velocity_basis(s, 32, {0.5, 0.3});
  const TemperatureBasis tb = build_temperature_basis(s, 2);
  const AssembledForms f = assemble_forms(vb, tb, 0.5, 0.3, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.K_visc + f.K_fric);
  CHECK(es.eigenvalues()(0) > 0.0);
  CHECK((f.K_visc - f.K_visc.transpose()).norm() <= 1e-12 * f.K_visc.norm());
}

TEST_CASE("manifest lists every mode") {
  const DomainSpec s = box();
  const VelocityBasis vb = build_velocity_basis(s, 5, {1.0, 1.0});
  const TemperatureBasis tb = build_temperature_basis(s, 3);
  const std::string m = basis_manifest(vb, tb);
  std::size_t lines = 0;
  for (char c : m) lines += c == '\n';
  CHECK(lines >= 8);
}
