#include <cmath>

#include <doctest.h>

#include "vpbwave/diagnostics.hpp"
#include "vpbwave/errors.hpp"

using namespace vpb;

namespace {

const ThermoState kBase = make_state(1.0, 0.0, 1.0);

CompositeWave flat() { return CompositeWave::build({kBase, kBase}, TransportModel{}); }

FluidField base_field(double X, double h) {
  FluidField f;
  f.h = h;
  const int n = static_cast<int>(std::lround(2.0 * X / h)) + 1;
  for (int i = 0; i < n; ++i) f.x.push_back(-X + i * h);
  f.v.assign(n, 1.0);
  f.u1.assign(n, 0.0);
  f.u2.assign(n, 0.0);
  f.u3.assign(n, 0.0);
  f.theta.assign(n, 1.0);
  return f;
}

ChargeField no_charge(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }

}  // namespace

TEST_CASE("norms of the perturbation") {
  const CompositeWave w = flat();
  FluidField f = base_field(10.0, 0.01);
  const DiagnosticsRecord zero = diagnostics_record(f, no_charge(f.size()), w, 0.0);
  CHECK(zero.l2_pert <= 1e-14);
  CHECK(zero.h1_pert <= 1e-14);
  CHECK(zero.linf_pert <= 1e-14);
  CHECK(zero.energy_fluid <= 1e-28);
  CHECK(zero.min_v == 1.0);

  // constant on a window of 2 units
  FluidField g = f;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g.x[i]) < 1.0) g.v[i] += 0.3;
  CHECK(perturbation_norms(g, w, 0.0).l2_pert == doctest::Approx(0.3 * std::sqrt(2.0)).epsilon(1e-2));

  // Gaussian: int e^{-2x^2} = int 4x^2 e^{-2x^2} = sqrt(pi / 2)
  FluidField gs = f;
  for (std::size_t i = 0; i < gs.size(); ++i) gs.theta[i] += std::exp(-gs.x[i] * gs.x[i]);
  const DiagnosticsRecord r = perturbation_norms(gs, w, 0.0);
  CHECK(r.l2_pert == doctest::Approx(std::sqrt(std::sqrt(M_PI / 2.0))).epsilon(1e-6));
  CHECK(r.h1_pert == doctest::Approx(std::sqrt(2.0 * std::sqrt(M_PI / 2.0))).epsilon(1e-4));
  CHECK(r.linf_pert == doctest::Approx(1.0));

  // homogeneity
  FluidField gs3 = f;
  for (std::size_t i = 0; i < gs3.size(); ++i) gs3.theta[i] += -3.0 * std::exp(-gs3.x[i] * gs3.x[i]);
  const DiagnosticsRecord r3 = perturbation_norms(gs3, w, 0.0);
  CHECK(r3.l2_pert == doctest::Approx(3.0 * r.l2_pert).epsilon(1e-12));
  CHECK(r3.h1_pert == doctest::Approx(3.0 * r.h1_pert).epsilon(1e-12));
  CHECK(r3.linf_pert == doctest::Approx(3.0 * r.linf_pert).epsilon(1e-12));
}

TEST_CASE("weighted norm against the closed form") {
  const CompositeWave w = flat();
  FluidField f = base_field(200.0, 0.05);
  for (double& v : f.v) v += 0.2;
  for (double t : {0.0, 3.0, 40.0}) {
    const double alpha = 0.125;
    const double expected = 0.04 / (1.0 + t) * std::sqrt(M_PI * (1.0 + t) / (2.0 * alpha));
    CHECK(perturbation_norms(f, w, t, alpha).weighted_l2 == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("fluid energy") {
  const CompositeWave w = flat();
  FluidField f = base_field(20.0, 0.05);
  const std::size_t n = f.size();
  ChargeField c = no_charge(n);
  CHECK(energy_fluid(f, c, w, 0.0) <= 1e-28);

  FluidField a = f, b = f, ab = f;
  ChargeField ca = c, cb = c, cab = c;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = f.x[i];
    const double left = std::exp(-(x + 10.0) * (x + 10.0)), right = std::exp(-(x - 10.0) * (x - 10.0));
    a.u1[i] += 0.1 * left;
    ab.u1[i] += 0.1 * left;
    ca.n2[i] = cab.n2[i] = 0.02 * left;
    b.theta[i] += 0.05 * right;
    ab.theta[i] += 0.05 * right;
    cb.Phi_x[i] = 0.03 * right;
    cab.Phi_x[i] += 0.03 * right;
  }
  const double ea = energy_fluid(a, ca, w, 0.0), eb = energy_fluid(b, cb, w, 0.0);
  CHECK(energy_fluid(ab, cab, w, 0.0) == doctest::Approx(ea + eb).epsilon(1e-12));

  // independent recomputation: trapezoid, centered/one-sided differences
  auto trap = [&](const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (i == 0 || i + 1 == n ? 0.5 : 1.0) * y[i] * y[i];
    return s * f.h;
  };
  auto diff = [&](const std::vector<double>& y) {
    std::vector<double> d(n);
    d[0] = (y[1] - y[0]) / f.h;
    d[n - 1] = (y[n - 1] - y[n - 2]) / f.h;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * f.h);
    return d;
  };
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = ab.theta[i] - 1.0;
  const double e = trap(ab.u1) + trap(diff(ab.u1)) + trap(z) + trap(diff(z)) + trap(cab.Phi_x) + trap(cab.n2) +
                   trap(diff(cab.n2));
  CHECK(energy_fluid(ab, cab, w, 0.0) == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("decay fits") {
  std::vector<double> t, y, y5, y1;
  for (int i = 0; i <= 40; ++i) {
    const double s = std::expm1(std::log1p(10.0) + (std::log1p(1000.0) - std::log1p(10.0)) * i / 40.0);
    t.push_back(s);
    y.push_back(std::pow(1.0 + s, -1.5));
    y5.push_back(7.0 * std::pow(1.0 + s, -1.5));
    y1.push_back(5.0 / (1.0 + s));
  }
  const DecayFit f = decay_fit(t, y, 10.0, 1000.0);
  CHECK(f.exponent == doctest::Approx(-1.5).epsilon(1e-6));
  CHECK(f.points == 41);
  CHECK(f.halfwidth < 1e-6);
  CHECK(std::abs(decay_fit(t, y5, 10.0, 1000.0).exponent - f.exponent) <= 1e-12);
  CHECK(decay_fit(t, y1, 10.0, 1000.0).exponent == doctest::Approx(-1.0).epsilon(1e-9));

  // Burgers slope decay for an order-one wave
  const BurgersWave b{0.0, 1.0};
  std::vector<double> wx;
  for (double s : t) {
    double m = 0.0;
    for (int k = -2000; k <= 2000; ++k) m = std::max(m, burgers_wx(s * (0.5 + k / 2000.0), s, b));
    wx.push_back(m);
  }
  CHECK(decay_fit(t, wx, 10.0, 1000.0).exponent == doctest::Approx(-1.0).epsilon(0.1));

  std::vector<double> bad = y;
  bad[20] = 0.0;
  CHECK_THROWS_AS(decay_fit(t, bad, 10.0, 1000.0), NonPositiveSeries);
  CHECK_THROWS_AS(decay_fit(t, y, 10.0, 12.0), DomainError);
}

TEST_CASE("csv rows") {
  DiagnosticsRecord r;
  r.t = 1.5;
  r.linf_pert = 0.25;
  const std::string h = diagnostics_csv_header();
  CHECK(h.rfind("t,", 0) == 0);
  const std::string row = diagnostics_csv_row(r);
  CHECK(row.rfind("1.5,", 0) == 0);
  CHECK(std::count(h.begin(), h.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.find('\n') == std::string::npos);
}
