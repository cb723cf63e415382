#include <cmath>
#include <numeric>

#include <doctest.h>

#include "vpbwave/diagnostics.hpp"
#include "vpbwave/errors.hpp"
#include "vpbwave/fluid.hpp"

using namespace vpb;

namespace {

double poisson_error(double h) {
  const double X = 10.0;
  const int n = static_cast<int>(std::lround(2.0 * X / h)) + 1;
  std::vector<double> n2(n), v(n, 1.0), exact(n), err(n);
  for (int i = 0; i < n; ++i) {
    const double x = -X + i * h;
    exact[i] = std::exp(-x * x);
    n2[i] = -x * std::exp(-x * x);  // (Phi_x)_x / 2
  }
  const std::vector<double> P = solve_poisson(n2, v, h);
  for (int i = 0; i < n; ++i) err[i] = P[i] - exact[i];
  return l2_norm(err, h) / l2_norm(exact, h);
}

EndStates small_ends() {
  const ThermoState L = make_state(1.0, 0.0, 1.0);
  const double vms = 1.02;
  const double tms = theta_from_vs(vms, entropy(L));
  const double tps = tms * 1.1;
  return forward_construct(L, vms, tps, vms * tps / tms * 0.98);
}

SolverConfig small_config() {
  SolverConfig c;
  c.h = 0.1;
  c.X = 20.0;
  c.T = 1.0;
  c.output_interval = 0.25;
  return c;
}

double sum(const std::vector<double>& a) { return std::accumulate(a.begin(), a.end(), 0.0); }

}  // namespace

TEST_CASE("poisson solver") {
  const std::vector<double> zero(41, 0.0), one(41, 1.0);
  for (double p : solve_poisson(zero, one, 0.1)) CHECK(p == 0.0);

  const double e1 = poisson_error(1e-2), e2 = poisson_error(5e-3);
  CHECK(e1 < 2e-5);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));

  std::vector<double> lump(41, 0.0);
  lump[20] = 1.0;
  CHECK_THROWS_AS(solve_poisson(lump, one, 0.1), NeutralityViolated);

  // discrete Poisson residual (1/v)(Phi_x / v)_x = 2 n2, checked face to face
  std::vector<double> n2(201), v(201);
  for (int i = 0; i < 201; ++i) {
    const double x = -10.0 + 0.1 * i;
    n2[i] = -x * std::exp(-x * x) / (1.0 + 0.2 * std::exp(-x * x));
    v[i] = 1.0 + 0.2 * std::exp(-x * x);
  }
  double tot = 0.0;
  for (int i = 0; i < 201; ++i) tot += n2[i] * v[i];
  for (int i = 0; i < 201; ++i) n2[i] -= tot / 201.0 / v[i];
  const std::vector<double> P = solve_poisson(n2, v, 0.1);
  CHECK(std::abs(P.front()) < 1e-12);
  CHECK(std::abs(P.back()) < 1e-12);
}

TEST_CASE("initial data") {
  const CompositeWave w = CompositeWave::build(small_ends(), TransportModel{});
  SolverConfig cfg = small_config();
  FluidField f;
  ChargeField c;
  Perturbation none;
  none.amplitude = 0.0;
  init_from_ansatz(w, none, cfg, f, c);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const ThermoState s = w.eval(f.x[i], 0.0);
    CHECK(f.v[i] == s.v);
    CHECK(f.u1[i] == s.u1());
    CHECK(f.theta[i] == s.theta);
    CHECK(c.n2[i] == 0.0);
    CHECK(c.Phi_x[i] == 0.0);
  }

  Perturbation g;
  init_from_ansatz(w, g, cfg, f, c);
  const PerturbationFields pf = perturbation_fields(f, w, 0.0);
  CHECK(linf_norm(pf.phi) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(linf_norm(c.Phi_x) == doctest::Approx(0.01).epsilon(1e-2));

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Perturbation r;
    r.shape = PerturbationShape::random;
    r.seed = seed;
    init_from_ansatz(w, r, cfg, f, c);
    double q = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      q += c.n2[i] * f.v[i] * cfg.h;
      scale += std::abs(c.n2[i] * f.v[i]) * cfg.h;
    }
    CHECK(std::abs(q) <= 1e-14 * std::max(1.0, scale));
    CHECK(linf_norm(perturbation_fields(f, w, 0.0).zeta) == doctest::Approx(0.01));
  }

  Perturbation big;
  big.amplitude = -5.0;
  CHECK_THROWS_AS(init_from_ansatz(w, big, cfg, f, c), PositivityViolation);
}

TEST_CASE("right-hand side") {
  SolverConfig cfg = small_config();
  const int n = cfg.nodes();
  FluidField f;
  f.h = cfg.h;
  f.x.resize(n);
  for (int i = 0; i < n; ++i) f.x[i] = -cfg.X + i * cfg.h;
  f.v.assign(n, 1.3);
  f.u1.assign(n, 0.2);
  f.u2.assign(n, 0.0);
  f.u3.assign(n, 0.0);
  f.theta.assign(n, 0.9);
  ChargeField c{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  FluidRates r = rhs(f, c, cfg);
  for (int i = 0; i < n; ++i) {
    CHECK(r.v[i] == 0.0);
    CHECK(r.u1[i] == 0.0);
    CHECK(std::abs(r.theta[i]) < 1e-15);
    CHECK(r.n2[i] == 0.0);
  }

  // transverse shear only drives u2
  for (int i = 0; i < n; ++i) f.u2[i] = 0.1 * std::sin(0.3 * f.x[i]);
  r = rhs(f, c, cfg);
  for (int i = 1; i + 1 < n; ++i) {
    CHECK(r.v[i] == 0.0);
    CHECK(r.u1[i] == 0.0);
    const double mu = cfg.transport.mu(0.9) / 1.3;
    CHECK(r.u2[i] == doctest::Approx(mu * (f.u2[i + 1] - 2 * f.u2[i] + f.u2[i - 1]) / (cfg.h * cfg.h)));
    CHECK(r.u3[i] == 0.0);
  }

  // mass and charge telescoping on a perturbed ansatz
  const CompositeWave w = CompositeWave::build(small_ends(), TransportModel{});
  Perturbation p;
  p.shape = PerturbationShape::random;
  init_from_ansatz(w, p, cfg, f, c);
  r = rhs(f, c, cfg);
  const double flux = 0.5 * (f.u1[n - 1] + f.u1[n - 2]) - 0.5 * (f.u1[0] + f.u1[1]);
  CHECK(sum(r.v) * cfg.h == doctest::Approx(flux).epsilon(1e-12));
  double scale = 0.0;
  for (double x : r.charge) scale += std::abs(x) * cfg.h;
  CHECK(std::abs(sum(r.charge) * cfg.h) <= 1e-12 * scale);
}

TEST_CASE("time stepping") {
  const CompositeWave w = CompositeWave::build(small_ends(), TransportModel{});
  SolverConfig cfg = small_config();
  Perturbation p;
  p.shape = PerturbationShape::random;

  SUBCASE("constant state is a fixed point") {
    const ThermoState s = make_state(1.2, 0.1, 0.8);
    const CompositeWave flat = CompositeWave::build({s, s}, TransportModel{});
    Perturbation none;
    none.amplitude = 0.0;
    FluidSolver sv(flat, cfg, none);
    for (int k = 0; k < 20; ++k) sv.step();
    for (std::size_t i = 0; i < sv.field().size(); ++i) {
      CHECK(sv.field().v[i] == doctest::Approx(1.2).epsilon(1e-14));
      CHECK(sv.field().u1[i] == doctest::Approx(0.1).epsilon(1e-13));
      CHECK(sv.field().theta[i] == doctest::Approx(0.8).epsilon(1e-15));
    }
  }

  SUBCASE("too large a step is refused and the state kept") {
    FluidSolver sv(w, cfg, p);
    const std::vector<double> v0 = sv.field().v;
    CHECK_THROWS_AS(sv.step(10.0), StabilityViolation);
    CHECK(sv.field().v == v0);
    CHECK(sv.time() == 0.0);
  }

  SUBCASE("charge conservation and far field") {
    FluidSolver sv(w, cfg, p);
    double q0 = 0.0;
    for (std::size_t i = 0; i < sv.field().size(); ++i) q0 += sv.charge().n2[i] * sv.field().v[i] * cfg.h;
    for (int k = 0; k < 100; ++k) {
      sv.step();
      double q = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < sv.field().size(); ++i) {
        q += sv.charge().n2[i] * sv.field().v[i] * cfg.h;
        scale += std::abs(sv.charge().n2[i] * sv.field().v[i]) * cfg.h;
      }
      CHECK(std::abs(q - q0) <= 1e-12 * std::max(scale, 1e-300) + 1e-300);
    }
    const std::size_t n = sv.field().size();
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{2}, n - 3, n - 2, n - 1}) {
      const ThermoState s = w.eval(sv.field().x[i], sv.time());
      CHECK(std::abs(sv.field().v[i] - s.v) <= 1e-8);
      CHECK(std::abs(sv.field().theta[i] - s.theta) <= 1e-7);
    }
  }

  SUBCASE("second order in time") {
    SolverConfig c = cfg;
    c.h = 0.2;
    c.X = 10.0;
    c.T = 0.5;
    FluidField base;
    ChargeField bc;
    init_from_ansatz(w, p, c, base, bc);
    const double dt0 = 0.5 * stable_dt(base, c);
    auto run = [&](int refine) {
      FluidSolver sv(w, c, p);
      const double dt = dt0 / refine;
      const int steps = static_cast<int>(std::lround(0.1 / dt0)) * refine;
      for (int k = 0; k < steps; ++k) sv.step(dt);
      return sv.field().theta;
    };
    const auto a = run(1), b = run(2), d = run(4), ref = run(16);
    double ea = 0.0, eb = 0.0, ed = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      ea = std::max(ea, std::abs(a[i] - ref[i]));
      eb = std::max(eb, std::abs(b[i] - ref[i]));
      ed = std::max(ed, std::abs(d[i] - ref[i]));
    }
    CHECK(ea / eb == doctest::Approx(4.0).epsilon(0.25));
    CHECK(eb / ed == doctest::Approx(4.0).epsilon(0.25));
  }

  SUBCASE("unperturbed run drifts only by the ansatz residual") {
    Perturbation none;
    none.amplitude = 0.0;
    FluidSolver sv(w, cfg, none);
    sv.run();
    const PerturbationFields pf = perturbation_fields(sv.field(), w, sv.time());
    double drift = std::max({linf_norm(pf.phi), linf_norm(pf.psi1), linf_norm(pf.zeta)});
    // time integral of the largest residual over [0, 1]
    double integral = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double t = (k + 0.5) / 20.0;
      double m = 0.0;
      for (double x = -cfg.X; x <= cfg.X; x += 0.1) {
        const CompositeResiduals r = composite_residuals(w, x, t);
        m = std::max({m, std::abs(r.momentum), std::abs(r.energy)});
      }
      integral += m / 20.0;
    }
    CHECK(drift > 0.0);
    CHECK(drift <= integral);
  }
}

TEST_CASE("run bookkeeping") {
  const ThermoState s = make_state(1.0, 0.0, 1.0);
  const CompositeWave flat = CompositeWave::build({s, s}, TransportModel{});
  SolverConfig cfg = small_config();
  Perturbation none;
  none.amplitude = 0.0;
  FluidSolver sv(flat, cfg, none);
  const auto recs = sv.run();
  REQUIRE(recs.size() == 5);
  CHECK(recs.back().t == 1.0);
  for (const auto& r : recs) {
    CHECK(r.linf_pert == 0.0);
    CHECK(r.l2_charge == 0.0);
    CHECK(r.energy_fluid == 0.0);
  }

  SolverConfig wide = cfg;
  wide.T = 100.0;
  const CompositeWave w = CompositeWave::build(small_ends(), TransportModel{});
  FluidSolver sv2(w, wide, none);
  CHECK_THROWS_AS(sv2.run(), BoundaryReached);
  CHECK(sv2.time() == 0.0);  // refused before stepping
}

TEST_CASE("mass coordinate") {
  std::vector<double> y(201);
  for (int i = 0; i < 201; ++i) y[i] = -5.0 + 0.05 * i;
  const MassCoordinate id = lagrangian_coordinate(y, std::vector<double>(201, 1.0));
  const MassCoordinate two = lagrangian_coordinate(y, std::vector<double>(201, 2.0));
  for (double q : {-4.0, -0.3, 0.0, 2.2}) {
    CHECK(id.forward(q) == doctest::Approx(q).epsilon(1e-14));
    CHECK(two.forward(q) == doctest::Approx(2.0 * q).epsilon(1e-14));
  }
  std::vector<double> rho(201);
  for (int i = 0; i < 201; ++i) rho[i] = 1.0 + 0.5 * std::sin(y[i]) * std::sin(y[i]);
  const MassCoordinate m = lagrangian_coordinate(y, rho);
  CHECK(m.forward(0.0) == 0.0);
  for (int k = 0; k < 100; ++k) {
    const double q = -4.9 + 0.098 * k;
    CHECK(m.inverse(m.forward(q)) == doctest::Approx(q).epsilon(1e-10));
  }
  for (std::size_t i = 1; i < m.xl().size(); ++i) CHECK(m.xl()[i] > m.xl()[i - 1]);
}
