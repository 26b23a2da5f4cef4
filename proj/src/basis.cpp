#include "hopfflow/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace hopfflow {

namespace {

constexpr double kPi = std::numbers::pi;

double shifted(const Vec3& x, int axis, const DomainSpec& spec) { return axis == 2 ? x[2] + spec.a : x[axis]; }

// int_0^L sin(pi n s / L) ds for integer n.
double sin_integral(int n, double L) {
  if (n == 0) return 0.0;
  return (n % 2 == 0) ? 0.0 : 2.0 * L / (kPi * n);
}

// |Omega| times the product of per-axis mean squares of the factors of component c.
double component_norm_sq(const std::array<int, 3>& k, int c, const DomainSpec& spec) {
  double v = spec.volume();
  for (int a = 0; a < 3; ++a) v *= (a != c && k[a] == 0) ? 1.0 : 0.5;
  return v;
}

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

}  // namespace

double TrigFactor::kappa() const { return kPi * k / length; }

double TrigFactor::value(double s) const {
  const double arg = kappa() * s;
  return sine ? std::sin(arg) : std::cos(arg);
}

double SepTerm::value(const Vec3& x, const DomainSpec& spec) const {
  double v = coef;
  for (int a = 0; a < 3; ++a) v *= f[a].value(shifted(x, a, spec));
  return v;
}

SepTerm SepTerm::derivative(int axis) const {
  SepTerm d = *this;
  TrigFactor& t = d.f[axis];
  d.coef *= t.kappa() * (t.sine ? 1.0 : -1.0);
  t.sine = !t.sine;
  return d;
}

double integrate_1d(const TrigFactor& a, const TrigFactor& b) {
  const double L = a.length;
  const int p = a.k, q = b.k;
  if (a.sine && b.sine) return (p == q && p > 0) ? 0.5 * L : 0.0;
  if (!a.sine && !b.sine) return p == q ? (p == 0 ? L : 0.5 * L) : 0.0;
  // sin(p) cos(q) = (sin(p+q) + sin(p-q)) / 2.
  const int s = a.sine ? p : q;
  const int c = a.sine ? q : p;
  if (s == 0) return 0.0;
  const double minus = s >= c ? sin_integral(s - c, L) : -sin_integral(c - s, L);
  return 0.5 * (sin_integral(s + c, L) + minus);
}

double integrate_product(const SepTerm& a, const SepTerm& b) {
  double v = a.coef * b.coef;
  for (int ax = 0; ax < 3 && v != 0.0; ++ax) v *= integrate_1d(a.f[ax], b.f[ax]);
  return v;
}

double face_integral(const SepTerm& a, const SepTerm& b, int axis, bool high) {
  double v = a.coef * b.coef;
  const double s = high ? a.f[axis].length : 0.0;
  v *= a.f[axis].value(s) * b.f[axis].value(s);
  for (int ax = 0; ax < 3 && v != 0.0; ++ax)
    if (ax != axis) v *= integrate_1d(a.f[ax], b.f[ax]);
  return v;
}

// ---------------------------------------------------------------------------

SepTerm VelocityMode::component(int c, const DomainSpec& spec) const {
  SepTerm t;
  t.coef = amp[c];
  for (int a = 0; a < 3; ++a) t.f[a] = TrigFactor{a == c, k[a], spec.length(a)};
  return t;
}

Vec3 VelocityMode::value(const Vec3& x, const DomainSpec& spec) const {
  Vec3 v{};
  for (int c = 0; c < 3; ++c) v[c] = component(c, spec).value(x, spec);
  return v;
}

std::array<double, 9> VelocityMode::grad(const Vec3& x, const DomainSpec& spec) const {
  std::array<double, 9> g{};
  for (int c = 0; c < 3; ++c) {
    const SepTerm t = component(c, spec);
    for (int b = 0; b < 3; ++b) g[3 * c + b] = t.derivative(b).value(x, spec);
  }
  return g;
}

SepTerm TemperatureMode::term(const DomainSpec& spec) const {
  SepTerm t;
  t.coef = amp;
  for (int a = 0; a < 3; ++a) t.f[a] = TrigFactor{false, k[a], spec.length(a)};
  return t;
}

double TemperatureMode::value(const Vec3& x, const DomainSpec& spec) const { return term(spec).value(x, spec); }

Vec3 TemperatureMode::grad(const Vec3& x, const DomainSpec& spec) const {
  const SepTerm t = term(spec);
  return {t.derivative(0).value(x, spec), t.derivative(1).value(x, spec), t.derivative(2).value(x, spec)};
}

std::array<int, 3> dealiased_band(const DomainSpec& spec) {
  return {(2 * spec.N1 - 1) / 3, (2 * spec.N2 - 1) / 3, (2 * spec.N3 - 1) / 3};
}

// ---------------------------------------------------------------------------

double viscous_entry(const VelocityMode& a, const VelocityMode& b, const DomainSpec& spec, double nu) {
  double acc = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const SepTerm a1 = a.component(c, spec).derivative(r), a2 = a.component(r, spec).derivative(c);
      const SepTerm b1 = b.component(c, spec).derivative(r), b2 = b.component(r, spec).derivative(c);
      acc += integrate_product(a1, b1) + integrate_product(a1, b2) + integrate_product(a2, b1) + integrate_product(a2, b2);
    }
  return 0.5 * nu * acc;
}

double friction_entry(const VelocityMode& a, const VelocityMode& b, const DomainSpec& spec, double gamma) {
  // Orthonormal tangents: sum_alpha (psi . tau_alpha)(phi . tau_alpha) is the
  // tangential inner product.
  double acc = 0.0;
  for (int axis = 0; axis < 2; ++axis)
    for (bool high : {false, true})
      for (int c = 0; c < 3; ++c) {
        if (c == axis) continue;
        acc += face_integral(a.component(c, spec), b.component(c, spec), axis, high);
      }
  return gamma * acc;
}

namespace {

double grid_gram_error(const QuadratureGrid& grid, const std::vector<std::vector<double>>& samples, int comps) {
  const std::size_t m = samples.size();
  double err = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < samples[i].size(); ++q) s += samples[i][q] * samples[j][q];
      s *= grid.weight();
      err = std::max(err, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  (void)comps;
  return err;
}

}  // namespace

VelocityBasis build_velocity_basis(const DomainSpec& spec, int m, const SlipOptions& opt) {
  validate(spec);
  if (m < 1) throw std::invalid_argument("basis: velocity mode count must be >= 1");
  const auto band = dealiased_band(spec);
  std::vector<VelocityMode> cand;
  for (int k1 = 0; k1 <= band[0]; ++k1)
    for (int k2 = 0; k2 <= band[1]; ++k2)
      for (int k3 = 0; k3 <= band[2]; ++k3) {
        const std::array<int, 3> k{k1, k2, k3};
        const int nz = (k1 > 0) + (k2 > 0) + (k3 > 0);
        if (nz < 2) continue;
        const Vec3 kap{kPi * k1 / spec.L1, kPi * k2 / spec.L2, kPi * k3 / spec.height()};
        std::vector<Vec3> pols;
        if (nz == 3) {
          const Vec3 p1 = normalized({-kap[1], kap[0], 0.0});
          const Vec3 p2 = normalized({kap[1] * p1[2] - kap[2] * p1[1], kap[2] * p1[0] - kap[0] * p1[2],
                                      kap[0] * p1[1] - kap[1] * p1[0]});
          pols = {p1, p2};
        } else {
          int a = -1, b = -1;
          for (int ax = 0; ax < 3; ++ax)
            if (k[ax] > 0) (a < 0 ? a : b) = ax;
          Vec3 p{};
          p[a] = -kap[b];
          p[b] = kap[a];
          pols = {normalized(p)};
        }
        for (std::size_t pi = 0; pi < pols.size(); ++pi) {
          VelocityMode md;
          md.k = k;
          md.polarization = static_cast<int>(pi);
          double nsq = 0.0;
          for (int c = 0; c < 3; ++c) nsq += pols[pi][c] * pols[pi][c] * component_norm_sq(k, c, spec);
          for (int c = 0; c < 3; ++c) md.amp[c] = pols[pi][c] / std::sqrt(nsq);
          md.rayleigh = viscous_entry(md, md, spec, opt.nu) + friction_entry(md, md, spec, opt.gamma);
          cand.push_back(md);
        }
      }
  if (static_cast<std::size_t>(m) > cand.size())
    throw std::invalid_argument(fmt::format("basis: {} velocity modes requested, {} available in the dealiased band", m, cand.size()));
  std::sort(cand.begin(), cand.end(), [](const VelocityMode& x, const VelocityMode& y) {
    if (x.rayleigh != y.rayleigh) return x.rayleigh < y.rayleigh;
    return std::tie(x.k, x.polarization) < std::tie(y.k, y.polarization);
  });
  VelocityBasis vb;
  vb.spec = spec;
  vb.modes.assign(cand.begin(), cand.begin() + m);

  const QuadratureGrid grid(spec);
  std::vector<std::vector<double>> samples(m, std::vector<double>(3 * grid.size()));
  for (int i = 0; i < m; ++i)
    for (std::size_t q = 0; q < grid.size(); ++q) {
      const Vec3 v = vb.modes[i].value(grid.point(q), spec);
      for (int c = 0; c < 3; ++c) samples[i][3 * q + c] = v[c];
    }
  vb.gram_error = grid_gram_error(grid, samples, 3);
  if (vb.gram_error > 1e-10) throw std::logic_error(fmt::format("basis: velocity Gram error {:.3e}", vb.gram_error));
  return vb;
}

TemperatureBasis build_temperature_basis(const DomainSpec& spec, int m) {
  validate(spec);
  if (m < 1) throw std::invalid_argument("basis: temperature mode count must be >= 1");
  const auto band = dealiased_band(spec);
  std::vector<TemperatureMode> cand;
  for (int k1 = 0; k1 <= band[0]; ++k1)
    for (int k2 = 0; k2 <= band[1]; ++k2)
      for (int k3 = 0; k3 <= band[2]; ++k3) {
        TemperatureMode md;
        md.k = {k1, k2, k3};
        double nsq = spec.volume();
        for (int a = 0; a < 3; ++a) {
          nsq *= md.k[a] == 0 ? 1.0 : 0.5;
          const double kap = kPi * md.k[a] / spec.length(a);
          md.eigenvalue += kap * kap;
        }
        md.amp = 1.0 / std::sqrt(nsq);
        cand.push_back(md);
      }
  if (static_cast<std::size_t>(m) > cand.size())
    throw std::invalid_argument(fmt::format("basis: {} temperature modes requested, {} available in the dealiased band", m, cand.size()));
  std::sort(cand.begin(), cand.end(), [](const TemperatureMode& x, const TemperatureMode& y) {
    if (x.eigenvalue != y.eigenvalue) return x.eigenvalue < y.eigenvalue;
    return x.k < y.k;
  });
  TemperatureBasis tb;
  tb.spec = spec;
  tb.modes.assign(cand.begin(), cand.begin() + m);
  const QuadratureGrid grid(spec);
  std::vector<std::vector<double>> samples(m, std::vector<double>(grid.size()));
  for (int i = 0; i < m; ++i)
    for (std::size_t q = 0; q < grid.size(); ++q) samples[i][q] = tb.modes[i].value(grid.point(q), spec);
  tb.gram_error = grid_gram_error(grid, samples, 1);
  if (tb.gram_error > 1e-10) throw std::logic_error(fmt::format("basis: temperature Gram error {:.3e}", tb.gram_error));
  return tb;
}

AssembledForms assemble_forms(const VelocityBasis& vb, const TemperatureBasis& tb, double nu, double gamma, double kappa) {
  const auto& spec = vb.spec;
  const Eigen::Index mv = static_cast<Eigen::Index>(vb.size()), mt = static_cast<Eigen::Index>(tb.size());
  AssembledForms f;
  f.K_visc.setZero(mv, mv);
  f.K_fric.setZero(mv, mv);
  f.G_vel.setZero(mv, mv);
  f.K_theta.setZero(mt, mt);
  f.G_temp.setZero(mt, mt);
  for (Eigen::Index i = 0; i < mv; ++i)
    for (Eigen::Index j = i; j < mv; ++j) {
      const auto& a = vb.modes[i];
      const auto& b = vb.modes[j];
      const double kv = viscous_entry(a, b, spec, nu);
      const double kf = friction_entry(a, b, spec, gamma);
      double g = 0.0;
      for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r)
          g += integrate_product(a.component(c, spec).derivative(r), b.component(c, spec).derivative(r));
      f.K_visc(i, j) = f.K_visc(j, i) = kv;
      f.K_fric(i, j) = f.K_fric(j, i) = kf;
      f.G_vel(i, j) = f.G_vel(j, i) = g;
    }
  for (Eigen::Index i = 0; i < mt; ++i)
    for (Eigen::Index j = i; j < mt; ++j) {
      const SepTerm a = tb.modes[i].term(spec), b = tb.modes[j].term(spec);
      double g = 0.0;
      for (int r = 0; r < 3; ++r) g += integrate_product(a.derivative(r), b.derivative(r));
      f.G_temp(i, j) = f.G_temp(j, i) = g;
      f.K_theta(i, j) = f.K_theta(j, i) = kappa * g;
    }
  return f;
}

std::string basis_manifest(const VelocityBasis& vb, const TemperatureBasis& tb) {
  std::string out;
  out += fmt::format("# velocity modes: index k1 k2 k3 polarization A1 A2 A3 rayleigh\n");
  out += fmt::format("velocity_count {}\n", vb.size());
  for (std::size_t i = 0; i < vb.size(); ++i) {
    const auto& m = vb.modes[i];
    out += fmt::format("v {} {} {} {} {} {:.17g} {:.17g} {:.17g} {:.17g}\n", i, m.k[0], m.k[1], m.k[2], m.polarization,
                       m.amp[0], m.amp[1], m.amp[2], m.rayleigh);
  }
  out += fmt::format("# temperature modes: index k1 k2 k3 amplitude eigenvalue\n");
  out += fmt::format("temperature_count {}\n", tb.size());
  for (std::size_t i = 0; i < tb.size(); ++i) {
    const auto& m = tb.modes[i];
    out += fmt::format("t {} {} {} {} {:.17g} {:.17g}\n", i, m.k[0], m.k[1], m.k[2], m.amp, m.eigenvalue);
  }
  out += fmt::format("velocity_gram_error {:.3e}\ntemperature_gram_error {:.3e}\n", vb.gram_error, tb.gram_error);
  return out;
}

}  // namespace hopfflow
