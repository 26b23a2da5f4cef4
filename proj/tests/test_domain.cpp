#include "doctest.h"

#include <cmath>

#include "hopfflow/domain.hpp"
#include "hopfflow/fields.hpp"

using namespace hopfflow;

namespace {
DomainSpec small_box() {
  DomainSpec s;
  s.L1 = 1.0;
  s.L2 = 1.3;
  s.a = 0.5;
  s.N1 = 8;
  s.N2 = 10;
  s.N3 = 12;
  return s;
}
}  // namespace

TEST_CASE("grid weights sum to the volume and nodes are midpoints") {
  const Domain d = build_domain(small_box());
  CHECK(d.grid.weight_sum() == doctest::Approx(1.0 * 1.3 * 1.0).epsilon(1e-14));
  CHECK(d.grid.coord(0, 0) == doctest::Approx(1.0 / 16));
  CHECK(d.grid.coord(2, 0) == doctest::Approx(-0.5 + 1.0 / 24));
  const auto ijk = d.grid.ijk(d.grid.index(3, 4, 5));
  CHECK(ijk[0] == 3);
  CHECK(ijk[1] == 4);
  CHECK(ijk[2] == 5);
}

TEST_CASE("patches: four lateral faces then the caps, areas add up") {
  const Domain d = build_domain(small_box());
  REQUIRE(d.patches.size() == 6);
  CHECK(d.lower_cap().kind == PatchKind::LowerCap);
  CHECK(d.upper_cap().kind == PatchKind::UpperCap);
  CHECK(d.lower_cap().normal[2] == -1.0);
  CHECK(d.upper_cap().normal[2] == 1.0);
  double total = 0.0;
  for (const auto& p : d.patches) {
    double w = 0.0;
    for (double x : p.weights) w += x;
    CHECK(w == doctest::Approx(p.area()).epsilon(1e-13));
    total += p.area();
    // Unit normal orthogonal to both tangents.
    double dot1 = 0, dot2 = 0;
    for (int c = 0; c < 3; ++c) {
      dot1 += p.normal[c] * p.tau1[c];
      dot2 += p.normal[c] * p.tau2[c];
    }
    CHECK(std::abs(dot1) < 1e-15);
    CHECK(std::abs(dot2) < 1e-15);
  }
  CHECK(total == doctest::Approx(2 * (1.0 * 1.3 + 1.0 * 1.0 + 1.3 * 1.0)));
}

TEST_CASE("cap distance is symmetric and vanishes on the caps") {
  const DomainSpec s = small_box();
  CHECK(dist_to_caps(-0.5, s) == 0.0);
  CHECK(dist_to_caps(0.5, s) == 0.0);
  CHECK(dist_to_caps(0.1, s) == doctest::Approx(dist_to_caps(-0.1, s)));
  CHECK(dist_to_caps(0.0, s) == doctest::Approx(0.5));
}

TEST_CASE("invalid specs are rejected") {
  DomainSpec s = small_box();
  s.N1 = 1;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = small_box();
  s.a = -1.0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
}

TEST_CASE("cosine transform round trip and exact derivative of a resolved mode") {
  const Domain d = build_domain(small_box());
  const SpectralTransform tr(d.grid);
  const double L2 = 1.3;
  ScalarField f = ScalarField::sample(d.grid, [&](const Vec3& x) {
    return std::cos(2 * M_PI * x[1] / L2) * std::cos(M_PI * (x[2] + 0.5));
  });
  f = with_spectrum(tr, f, kAllCos);
  const auto back = tr.inverse(f.spectral->coeffs, kAllCos);
  for (std::size_t q = 0; q < back.size(); ++q) CHECK(back[q] == doctest::Approx(f.values[q]).epsilon(1e-12));
  const ScalarField dz = derivative(tr, f, 2);
  for (std::size_t q = 0; q < d.grid.size(); ++q) {
    const Vec3 x = d.grid.point(q);
    const double exact = -M_PI * std::cos(2 * M_PI * x[1] / L2) * std::sin(M_PI * (x[2] + 0.5));
    CHECK(std::abs(dz.values[q] - exact) < 1e-11);
  }
}
