#include "vpbwave/eos.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "vpbwave/errors.hpp"

namespace vpb {
namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << name << " must be positive (got " << value << ")";
    throw DomainError(os.str());
  }
}

double sign_of(Family family) { return family == Family::plus ? 1.0 : -1.0; }

// Signed integral of lambda over [a, b] (b may be below a).
double curve_integral(double a, double b, double s, Family family) {
  if (a == b) return 0.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  auto integrand = [s, family](double eta) { return lambda(eta, s, family); };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      integrand, lo, hi, 15, 1e-14, &err);
  if (err > 1e-10) {
    throw ConvergenceFailure("rarefaction curve quadrature missed 1e-10 absolute tolerance", err);
  }
  return a < b ? value : -value;
}

// Pressure along the isentrope s: (1/(2 pi)) e^{s-1} v^{-5/3}.
double isentropic_pressure(double v, double s) {
  return std::exp(s - 1.0) * std::pow(v, -5.0 / 3.0) / (2.0 * kPi);
}

double isentropic_volume(double p, double s) {
  return std::pow(std::exp(s - 1.0) / (2.0 * kPi * p), 3.0 / 5.0);
}

}  // namespace

ThermoState make_state(double v, double u1, double theta) {
  ThermoState s;
  s.v = v;
  s.u = {u1, 0.0, 0.0};
  s.theta = theta;
  return s;
}

double pressure(double v, double theta) {
  require_positive(v, "v");
  require_positive(theta, "theta");
  return 2.0 * theta / (3.0 * v);
}

double pressure(const ThermoState& s) { return pressure(s.v, s.theta); }

double entropy(double v, double theta) {
  require_positive(v, "v");
  require_positive(theta, "theta");
  return (2.0 / 3.0) * std::log(v) + std::log(4.0 * kPi * theta / 3.0) + 1.0;
}

double entropy(const ThermoState& s) { return entropy(s.v, s.theta); }

double theta_from_vs(double v, double s) {
  require_positive(v, "v");
  return 3.0 / (4.0 * kPi) * std::exp(s - 1.0) * std::pow(v, -2.0 / 3.0);
}

double lambda(double v, double s, Family family) {
  require_positive(v, "v");
  return sign_of(family) * std::sqrt(5.0 / (6.0 * kPi) * std::pow(v, -8.0 / 3.0) * std::exp(s - 1.0));
}

double volume_for_speed(double speed, double s, Family family) {
  if (!(speed * sign_of(family) > 0.0)) {
    throw DomainError("characteristic speed has the wrong sign for its family");
  }
  return std::pow(5.0 / (6.0 * kPi) * std::exp(s - 1.0) / (speed * speed), 3.0 / 8.0);
}

double rarefaction_u(double v_start, double u_start, double v_end, double s, Family family) {
  require_positive(v_start, "v_start");
  if (v_end < v_start) {
    throw DomainError("rarefaction curve is only defined for v_end >= v_start");
  }
  return u_start - curve_integral(v_start, v_end, s, family);
}

ThermoState StarStates::minus_star() const { return make_state(v_minus_star, u_star, theta_minus_star); }
ThermoState StarStates::plus_star() const { return make_state(v_plus_star, u_star, theta_plus_star); }

namespace {

struct CurveSystem {
  const EndStates& ends;
  double s_minus;
  double s_plus;

  double u_left(double a) const {
    return ends.left.u1() - curve_integral(ends.left.v, a, s_minus, Family::minus);
  }
  double u_right(double b) const {
    return ends.right.u1() - curve_integral(ends.right.v, b, s_plus, Family::plus);
  }
  std::array<double, 2> residual(double a, double b) const {
    return {u_left(a) - u_right(b), isentropic_pressure(a, s_minus) - isentropic_pressure(b, s_plus)};
  }
};

StarStates finish(const CurveSystem& sys, double a, double b, int iterations, bool bisection) {
  StarStates st;
  st.v_minus_star = a;
  st.v_plus_star = b;
  st.s_minus = sys.s_minus;
  st.s_plus = sys.s_plus;
  st.theta_minus_star = theta_from_vs(a, sys.s_minus);
  st.theta_plus_star = theta_from_vs(b, sys.s_plus);
  st.u_star = 0.5 * (sys.u_left(a) + sys.u_right(b));
  st.p_star = 0.5 * (pressure(a, st.theta_minus_star) + pressure(b, st.theta_plus_star));
  st.iterations = iterations;
  st.used_bisection = bisection;
  return st;
}

void check_admissible(const EndStates& ends, double a, double b) {
  // Closed region; only rounding-level slack below the end volumes.
  const double slack = 64.0 * std::numeric_limits<double>::epsilon();
  if (a < ends.left.v * (1.0 - slack) || b < ends.right.v * (1.0 - slack)) {
    std::ostringstream os;
    os.precision(12);
    os << "end states are not connected by 1-rarefaction/contact/3-rarefaction: star volumes ("
       << a << ", " << b << ") fall below end volumes (" << ends.left.v << ", " << ends.right.v
       << ")";
    throw NoSolution(os.str());
  }
}

}  // namespace

StarStates solve_star_states(const EndStates& ends, const StarSolveOptions& opts) {
  require_positive(opts.tol, "tol");
  const CurveSystem sys{ends, entropy(ends.left), entropy(ends.right)};

  // Damped Newton on (v_-^*, v_+^*).
  double a = ends.left.v;
  double b = ends.right.v;
  auto r = sys.residual(a, b);
  auto norm = [](const std::array<double, 2>& x) { return std::hypot(x[0], x[1]); };
  for (int it = 0; it < opts.newton_budget; ++it) {
    if (std::abs(r[0]) <= opts.tol && std::abs(r[1]) <= opts.tol) {
      check_admissible(ends, a, b);
      return finish(sys, a, b, it, false);
    }
    const double j11 = -lambda(a, sys.s_minus, Family::minus);
    const double j12 = lambda(b, sys.s_plus, Family::plus);
    const double j21 = -(5.0 / 3.0) * isentropic_pressure(a, sys.s_minus) / a;
    const double j22 = (5.0 / 3.0) * isentropic_pressure(b, sys.s_plus) / b;
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 0.0)) break;
    const double da = -(r[0] * j22 - j12 * r[1]) / det;
    const double db = -(j11 * r[1] - j21 * r[0]) / det;
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      const double na = a + step * da;
      const double nb = b + step * db;
      if (!(na > 0.0 && nb > 0.0)) continue;
      const auto nr = sys.residual(na, nb);
      if (norm(nr) < norm(r) || k == 39) {
        a = na;
        b = nb;
        r = nr;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  // Nested bisection: outer on v_-^*, inner pressure match in closed form.
  auto partner = [&](double av) { return isentropic_volume(isentropic_pressure(av, sys.s_minus), sys.s_plus); };
  auto g = [&](double av) { return sys.u_left(av) - sys.u_right(partner(av)); };
  double lo = ends.left.v;
  if (g(lo) > opts.tol) {
    throw NoSolution("end states outside the admissible region: 1-rarefaction would need v_-^* < v_-");
  }
  double hi = 2.0 * lo;
  int expand = 0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (++expand > 60) throw NoSolution("no bracket for the star-state velocity match");
  }
  for (int it = 0; it < opts.bisection_budget; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm < 0.0) lo = mid; else hi = mid;
    const double am = 0.5 * (lo + hi);
    const double bm = partner(am);
    const auto rr = sys.residual(am, bm);
    if (std::abs(rr[0]) <= opts.tol && std::abs(rr[1]) <= opts.tol) {
      check_admissible(ends, am, bm);
      return finish(sys, am, bm, opts.newton_budget + it + 1, true);
    }
    if (hi - lo <= std::numeric_limits<double>::epsilon() * hi) break;
  }
  throw NoSolution("star-state iteration budget exhausted");
}

StarStates solve_star_states(const EndStates& ends, double tol) {
  StarSolveOptions opts;
  opts.tol = tol;
  return solve_star_states(ends, opts);
}

WaveStrengths wave_strengths(const StarStates& st, const EndStates& ends) {
  WaveStrengths w;
  w.rarefaction_minus = std::abs(st.v_minus_star - ends.left.v) + std::abs(st.theta_minus_star - ends.left.theta);
  w.contact = std::abs(st.theta_plus_star - st.theta_minus_star);
  w.rarefaction_plus = std::abs(st.v_plus_star - ends.right.v) + std::abs(st.theta_plus_star - ends.right.theta);
  const double dv = ends.right.v - ends.left.v;
  const double du = ends.right.u1() - ends.left.u1();
  const double dt = ends.right.theta - ends.left.theta;
  w.total = std::sqrt(dv * dv + du * du + dt * dt);
  return w;
}

ThermoState riemann_fan_eval(const StarStates& st, const EndStates& ends, double xi) {
  const double lam_l = lambda(ends.left.v, st.s_minus, Family::minus);
  const double lam_ls = lambda(st.v_minus_star, st.s_minus, Family::minus);
  const double lam_rs = lambda(st.v_plus_star, st.s_plus, Family::plus);
  const double lam_r = lambda(ends.right.v, st.s_plus, Family::plus);
  if (xi < lam_l) return ends.left;
  if (xi <= lam_ls) {
    const double v = volume_for_speed(xi, st.s_minus, Family::minus);
    return make_state(v, rarefaction_u(ends.left.v, ends.left.u1(), v, st.s_minus, Family::minus),
                      theta_from_vs(v, st.s_minus));
  }
  if (xi < 0.0) return st.minus_star();
  if (xi < lam_rs) return st.plus_star();
  if (xi <= lam_r) {
    const double v = volume_for_speed(xi, st.s_plus, Family::plus);
    return make_state(v, rarefaction_u(ends.right.v, ends.right.u1(), v, st.s_plus, Family::plus),
                      theta_from_vs(v, st.s_plus));
  }
  return ends.right;
}

EndStates forward_construct(const ThermoState& left, double v_minus_star, double theta_plus_star,
                            double v_plus) {
  require_positive(theta_plus_star, "theta_plus_star");
  require_positive(v_plus, "v_plus");
  const double s_minus = entropy(left);
  const double theta_ms = theta_from_vs(v_minus_star, s_minus);
  const double u_star = left.u1() - curve_integral(left.v, v_minus_star, s_minus, Family::minus);
  const double p_star = pressure(v_minus_star, theta_ms);
  const double v_plus_star = 2.0 * theta_plus_star / (3.0 * p_star);
  const double s_plus = entropy(v_plus_star, theta_plus_star);
  // u_* = u_+ - int_{v_+}^{v_+^*} lambda_+  =>  u_+ = u_* + int_{v_+}^{v_+^*} lambda_+
  const double u_plus = u_star + curve_integral(v_plus, v_plus_star, s_plus, Family::plus);
  EndStates ends;
  ends.left = left;
  ends.right = make_state(v_plus, u_plus, theta_from_vs(v_plus, s_plus));
  return ends;
}

}  // namespace vpb
