#include <algorithm>
#include <cmath>
#include <numbers>

#include "vpbwave/errors.hpp"
#include "vpbwave/waves.hpp"

namespace vpb {

double rarefaction_u_exact(double v_start, double u_start, double v_end, double s, Family family) {
  if (!(v_start > 0.0) || !(v_end > 0.0)) throw DomainError("volumes must be positive");
  // lambda = sign * K v^{-4/3}
  const double k = std::sqrt(5.0 / (6.0 * std::numbers::pi) * std::exp(s - 1.0));
  const double sign = family == Family::plus ? 1.0 : -1.0;
  return u_start - sign * 3.0 * k * (std::cbrt(1.0 / v_start) - std::cbrt(1.0 / v_end));
}

RarefactionWave RarefactionWave::build(Family family, const StarStates& stars, const EndStates& ends) {
  RarefactionWave r;
  r.family = family;
  if (family == Family::minus) {
    r.end = ends.left;
    r.s = stars.s_minus;
    r.v_star = stars.v_minus_star;
    r.burgers = {lambda(r.end.v, r.s, family), lambda(r.v_star, r.s, family)};
  } else {
    r.end = ends.right;
    r.s = stars.s_plus;
    r.v_star = stars.v_plus_star;
    r.burgers = {lambda(r.v_star, r.s, family), lambda(r.end.v, r.s, family)};
  }
  return r;
}

WaveSample RarefactionWave::eval(double x, double t) const {
  WaveSample out;
  out.v = end.v;
  out.u = end.u1();
  out.theta = end.theta;
  if (v_star == end.v) return out;
  const double w = burgers_w(x, t, burgers);
  const double wx = burgers_wx(x, t, burgers);
  const double V = volume_for_speed(w, s, family);
  out.v = V;
  out.u = rarefaction_u_exact(end.v, end.u1(), V, s, family);
  out.theta = end.theta * std::pow(end.v / V, 2.0 / 3.0);
  // lambda(V) = w  =>  dV/dw = -(3/4) V / w;  w_t = -w w_x
  out.v_x = -0.75 * V / w * wx;
  out.v_t = 0.75 * V * wx;
  out.u_x = -w * out.v_x;
  out.u_t = -w * out.v_t;
  out.theta_x = -(2.0 / 3.0) * out.theta / V * out.v_x;
  out.theta_t = -(2.0 / 3.0) * out.theta / V * out.v_t;
  return out;
}

ThermoState RarefactionWave::state(double x, double t) const {
  const WaveSample s = eval(x, t);
  return make_state(s.v, s.u, s.theta);
}

ThermoState rarefaction_profile(double x, double t, const RarefactionWave& wave) { return wave.state(x, t); }

CompositeWave CompositeWave::build(const EndStates& ends, const TransportModel& transport,
                                   const ContactOptions& contact_opts, const StarSolveOptions& star_opts) {
  CompositeWave w;
  w.ends = ends;
  w.transport = transport;
  w.stars = solve_star_states(ends, star_opts);
  w.rare_minus = RarefactionWave::build(Family::minus, w.stars, ends);
  w.rare_plus = RarefactionWave::build(Family::plus, w.stars, ends);
  w.contact = contact_selfsimilar_solve(w.stars.theta_minus_star, w.stars.theta_plus_star, w.stars.p_star,
                                        transport, contact_opts);
  w.contact.u_star = w.stars.u_star;
  return w;
}

WaveSample CompositeWave::sample(double x, double t) const {
  const WaveSample c = contact_eval(contact, x, t);
  const WaveSample m = rare_minus.eval(x, t);
  const WaveSample p = rare_plus.eval(x, t);
  WaveSample out;
  out.v = c.v + m.v + p.v - stars.v_minus_star - stars.v_plus_star;
  out.u = c.u + m.u + p.u - 2.0 * stars.u_star;
  out.theta = c.theta + m.theta + p.theta - stars.theta_minus_star - stars.theta_plus_star;
  out.v_x = c.v_x + m.v_x + p.v_x;
  out.u_x = c.u_x + m.u_x + p.u_x;
  out.theta_x = c.theta_x + m.theta_x + p.theta_x;
  out.v_t = c.v_t + m.v_t + p.v_t;
  out.u_t = c.u_t + m.u_t + p.u_t;
  out.theta_t = c.theta_t + m.theta_t + p.theta_t;
  return out;
}

ThermoState CompositeWave::eval(double x, double t) const {
  const WaveSample s = sample(x, t);
  return make_state(s.v, s.u, s.theta);
}

ThermoState composite_eval(const CompositeWave& wave, double x, double t) { return wave.eval(x, t); }

namespace {

// Fourth-order centered first derivative from f(x +- h), f(x +- 2h).
template <class F>
double d4(F&& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

}  // namespace

CompositeResiduals composite_residuals(const CompositeWave& wave, double x, double t, double hx) {
  const TransportModel& tm = wave.transport;
  const WaveSample s = wave.sample(x, t);
  auto pressure_at = [&](double y) {
    const WaveSample q = wave.sample(y, t);
    return 2.0 * q.theta / (3.0 * q.v);
  };
  auto momentum_flux = [&](double y) {
    const WaveSample q = wave.sample(y, t);
    return (4.0 / 3.0) * tm.mu(q.theta) * q.u_x / q.v;
  };
  auto heat_flux = [&](double y) {
    const WaveSample q = wave.sample(y, t);
    return tm.kappa(q.theta) * q.theta_x / q.v;
  };
  auto u_at = [&](double y) { return wave.sample(y, t).u; };

  CompositeResiduals r;
  const double ux = d4(u_at, x, hx);
  const double p = 2.0 * s.theta / (3.0 * s.v);
  r.mass = s.v_t - ux;
  r.momentum = s.u_t + d4(pressure_at, x, hx) - d4(momentum_flux, x, hx);
  r.transverse = 0.0;
  r.energy = s.theta_t + p * ux - d4(heat_flux, x, hx) - (4.0 / 3.0) * tm.mu(s.theta) * ux * ux / s.v;
  r.r1 = contact_r1(wave.contact, x, t, hx);
  const WaveSample c = contact_eval(wave.contact, x, t);
  r.r2 = -(4.0 / 3.0) * tm.mu(c.theta) / c.v * c.u_x * c.u_x;
  return r;
}

double contact_r1(const ContactProfile& profile, double x, double t, double hx) {
  const WaveSample c = contact_eval(profile, x, t);
  auto flux = [&](double y) {
    const WaveSample q = contact_eval(profile, y, t);
    return (4.0 / 3.0) * profile.transport.mu(q.theta) / q.v * q.u_x;
  };
  return c.u_t - d4(flux, x, hx);
}

const char* to_string(Region r) {
  switch (r) {
    case Region::omega_minus: return "omega_minus";
    case Region::omega_c: return "omega_c";
    case Region::omega_plus: return "omega_plus";
  }
  return "?";
}

Region region_classify(const StarStates& stars, double x, double t) {
  const double lm = lambda(stars.v_minus_star, stars.s_minus, Family::minus);
  const double lp = lambda(stars.v_plus_star, stars.s_plus, Family::plus);
  if (2.0 * x < lm * t) return Region::omega_minus;
  if (2.0 * x > lp * t) return Region::omega_plus;
  return Region::omega_c;
}

double weight_hat_w(double x, double t, double alpha) {
  return std::exp(-alpha * x * x / (1.0 + t)) / std::sqrt(1.0 + t);
}

double weight_hat_g(double x, double t, double alpha) {
  const double s = std::sqrt(alpha / (1.0 + t));
  return 0.5 * std::sqrt(std::numbers::pi / alpha) * std::erfc(-s * x);
}

double c0_constant(const StarStates& stars, double c1) {
  const double lm = lambda(stars.v_minus_star, stars.s_minus, Family::minus);
  const double lp = lambda(stars.v_plus_star, stars.s_plus, Family::plus);
  return 0.1 * std::min({std::abs(lm), lp, c1 * lm * lm, c1 * lp * lp, 1.0});
}

}  // namespace vpb
