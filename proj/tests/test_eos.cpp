#include <cmath>
#include <random>

#include <doctest.h>

#include "vpbwave/eos.hpp"
#include "vpbwave/errors.hpp"

using namespace vpb;

namespace {

// -dp/dv along the isentrope, by a centered difference of pressure(v, theta(v, s))
double isentropic_slope(double v, double s) {
  const double h = 1e-5 * v;
  const double pp = pressure(v + h, theta_from_vs(v + h, s));
  const double pm = pressure(v - h, theta_from_vs(v - h, s));
  return -(pp - pm) / (2.0 * h);
}

}  // namespace

TEST_CASE("entropy and its inverse") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  for (int k = 0; k < 200; ++k) {
    const double v = U(rng), th = U(rng);
    CHECK(theta_from_vs(v, entropy(v, th)) == doctest::Approx(th).epsilon(1e-12));
  }
  CHECK(pressure(1.0, 1.0) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(pressure(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(entropy(1.0, 0.0), DomainError);
}

TEST_CASE("characteristic speed is the isentropic sound speed") {
  // lambda^2 = -dp/dv at fixed s; the entropy carries the +1 constant, so the
  // radicand has e^{s-1}
  for (double v : {0.7, 1.0, 1.6, 3.0})
    for (double s : {-0.5, 0.3, 1.2}) {
      const double l = lambda(v, s, Family::plus);
      CHECK(l * l == doctest::Approx(isentropic_slope(v, s)).epsilon(1e-8));
      CHECK(lambda(v, s, Family::minus) == doctest::Approx(-l));
    }
  const double s1 = 1.0 + std::log(6.0 * M_PI / 5.0);
  CHECK(lambda(1.0, s1, Family::plus) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lambda(1.0, s1, Family::minus) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(lambda(2.0, 0.4, Family::plus) < lambda(1.0, 0.4, Family::plus));
  CHECK_THROWS_AS(lambda(0.0, 0.4, Family::plus), DomainError);
  const double v = volume_for_speed(0.8, 0.4, Family::plus);
  CHECK(lambda(v, 0.4, Family::plus) == doctest::Approx(0.8).epsilon(1e-13));
}

TEST_CASE("rarefaction curve integral") {
  const double s = std::log(6.0 * M_PI / 5.0);
  CHECK(rarefaction_u(1.3, 0.2, 1.3, s, Family::minus) == 0.2);
  CHECK(rarefaction_u(1.0, 0.0, 2.0, s, Family::minus) > 0.0);
  CHECK_THROWS_AS(rarefaction_u(2.0, 0.0, 1.0, s, Family::minus), DomainError);

  // fixed-step trapezoid at 1e6 panels
  const int n = 1000000;
  const double a = 1.0, b = 2.0, h = (b - a) / n;
  double sum = 0.5 * (lambda(a, s, Family::minus) + lambda(b, s, Family::minus));
  for (int i = 1; i < n; ++i) sum += lambda(a + i * h, s, Family::minus);
  CHECK(rarefaction_u(1.0, 0.0, 2.0, s, Family::minus) == doctest::Approx(-sum * h).epsilon(1e-8));
}

TEST_CASE("star states: degenerate and forward constructed") {
  const ThermoState c = make_state(1.0, 0.0, 1.0);
  const StarStates z = solve_star_states({c, c}, 1e-12);
  CHECK(z.v_minus_star == doctest::Approx(1.0));
  CHECK(z.v_plus_star == doctest::Approx(1.0));
  CHECK(std::abs(z.u_star) < 1e-12);
  CHECK(z.p_star == doctest::Approx(2.0 / 3.0));
  CHECK(wave_strengths(z, {c, c}).total == 0.0);

  // left (1,0,1), v_-^* = 1.1, contact chosen so that v_+^* = 1.05
  const double vms = 1.1;
  const double pstar = pressure(vms, theta_from_vs(vms, entropy(c)));
  const double tps = 1.5 * pstar * 1.05;
  const EndStates ends = forward_construct(c, vms, tps, 1.0);
  const StarStates st = solve_star_states(ends, 1e-13);
  CHECK(st.v_minus_star == doctest::Approx(1.1).epsilon(1e-8));
  CHECK(st.v_plus_star == doctest::Approx(1.05).epsilon(1e-8));
  CHECK(st.theta_plus_star == doctest::Approx(tps).epsilon(1e-8));
  CHECK(std::abs(pressure(st.minus_star()) - pressure(st.plus_star())) < 1e-12);
  CHECK(entropy(st.minus_star()) == doctest::Approx(entropy(ends.left)).epsilon(1e-12));
  CHECK(entropy(st.plus_star()) == doctest::Approx(entropy(ends.right)).epsilon(1e-12));

  // right end volume beyond v_+^*: outside the admissible region
  const EndStates bad = forward_construct(c, vms, tps, 1.2);
  CHECK_THROWS_AS(solve_star_states(bad, 1e-12), NoSolution);
}

TEST_CASE("random forward-constructed data are recovered") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int done = 0;
  while (done < 30) {
    const ThermoState L = make_state(0.5 + 2.0 * U(rng), U(rng) - 0.5, 0.5 + U(rng));
    const double vms = L.v * (1.0 + 0.05 * U(rng));
    const double tms = theta_from_vs(vms, entropy(L));
    const double tps = tms * (1.0 + 0.2 * (U(rng) - 0.5));
    const double vps = vms * tps / tms;
    const EndStates ends = forward_construct(L, vms, tps, vps * (1.0 - 0.05 * U(rng)));
    if (wave_strengths(solve_star_states(ends, 1e-12), ends).total > 0.3) continue;
    const StarStates st = solve_star_states(ends, 1e-13);
    CHECK(st.v_minus_star == doctest::Approx(vms).epsilon(1e-9));
    CHECK(st.v_plus_star == doctest::Approx(vps).epsilon(1e-9));
    CHECK(st.theta_plus_star == doctest::Approx(tps).epsilon(1e-9));
    ++done;
  }
}

TEST_CASE("inviscid fan") {
  const ThermoState c = make_state(1.0, 0.0, 1.0);
  const double vms = 1.08;
  const double pstar = pressure(vms, theta_from_vs(vms, entropy(c)));
  const EndStates ends = forward_construct(c, vms, 1.5 * pstar * 1.2, 1.1);
  const StarStates st = solve_star_states(ends, 1e-13);

  const ThermoState far = riemann_fan_eval(st, ends, -1e3);
  CHECK(far.v == ends.left.v);
  CHECK(far.theta == ends.left.theta);
  const ThermoState lm = riemann_fan_eval(st, ends, -1e-12), lp = riemann_fan_eval(st, ends, 1e-12);
  CHECK(lm.v == doctest::Approx(st.v_minus_star));
  CHECK(lp.v == doctest::Approx(st.v_plus_star));
  CHECK(lm.theta == doctest::Approx(st.theta_minus_star));
  CHECK(lp.theta == doctest::Approx(st.theta_plus_star));

  const double a = lambda(st.v_plus_star, st.s_plus, Family::plus);
  const double b = lambda(ends.right.v, st.s_plus, Family::plus);
  for (int k = 1; k < 10; ++k) {
    const double xi = a + (b - a) * k / 10.0;
    const ThermoState s = riemann_fan_eval(st, ends, xi);
    CHECK(std::abs(lambda(s.v, st.s_plus, Family::plus) - xi) < 1e-10);
  }
  // v increases toward the contact along the 1-fan
  const double a1 = lambda(ends.left.v, st.s_minus, Family::minus);
  const double b1 = lambda(st.v_minus_star, st.s_minus, Family::minus);
  double prev = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double v = riemann_fan_eval(st, ends, a1 + (b1 - a1) * k / 20.0).v;
    CHECK(v >= prev);
    prev = v;
  }
}
