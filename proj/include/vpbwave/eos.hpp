#pragma once

// Equation of state, entropy and characteristic speeds of the Lagrangian
// Euler system with gas constant R = 2/3 (so e = theta, p = 2 theta / (3 v)),
// rarefaction curves, and the solver for the intermediate states of the
// 1-rarefaction / 2-contact / 3-rarefaction Riemann pattern.

#include <array>

namespace vpb {

inline constexpr double kGasConstant = 2.0 / 3.0;

/// Fluid triple in Lagrangian variables: specific volume, velocity, temperature.
struct ThermoState {
  double v = 1.0;
  std::array<double, 3> u{0.0, 0.0, 0.0};
  double theta = 1.0;

  double u1() const noexcept { return u[0]; }
  bool operator==(const ThermoState&) const = default;
};

ThermoState make_state(double v, double u1, double theta);

/// 1st family (minus, left-going) or 3rd family (plus, right-going).
enum class Family { minus, plus };

double pressure(double v, double theta);
double pressure(const ThermoState& s);

/// s = (2/3) ln v + ln(4 pi theta / 3) + 1
double entropy(double v, double theta);
double entropy(const ThermoState& s);

/// Inverse of entropy() in theta at fixed v.
double theta_from_vs(double v, double s);

/// Characteristic speed of the given family: the signed root of -dp/dv at
/// constant entropy, +/- sqrt(5/(6 pi) v^{-8/3} e^{s-1}).
double lambda(double v, double s, Family family);

/// Volume at which lambda(v, s, family) equals `speed`. The sign of `speed`
/// must match the family.
double volume_for_speed(double speed, double s, Family family);

/// u_start - integral_{v_start}^{v_end} lambda(eta, s) d eta, by adaptive
/// Gauss-Kronrod quadrature (absolute tolerance 1e-10). Requires
/// v_end >= v_start > 0.
double rarefaction_u(double v_start, double u_start, double v_end, double s, Family family);

struct EndStates {
  ThermoState left;
  ThermoState right;
};

struct StarStates {
  double v_minus_star = 1.0;
  double v_plus_star = 1.0;
  double u_star = 0.0;
  double theta_minus_star = 1.0;
  double theta_plus_star = 1.0;
  double p_star = 2.0 / 3.0;
  double s_minus = 0.0;  // entropy of the left end state (constant on the 1-curve)
  double s_plus = 0.0;   // entropy of the right end state (constant on the 3-curve)
  int iterations = 0;
  bool used_bisection = false;

  ThermoState minus_star() const;
  ThermoState plus_star() const;
};

struct StarSolveOptions {
  double tol = 1e-12;
  int newton_budget = 100;
  int bisection_budget = 200;
};

/// Solves for the intermediate states. Unknowns are (v_-^*, v_+^*); the
/// velocity and temperatures follow from the curves. Throws NoSolution if
/// the root lies outside {v_-^* >= v_-, v_+^* >= v_+} or the iteration
/// budget is exhausted.
StarStates solve_star_states(const EndStates& ends, const StarSolveOptions& opts);
StarStates solve_star_states(const EndStates& ends, double tol);

/// Strengths of the three waves and the total strength |right - left|.
struct WaveStrengths {
  double rarefaction_minus = 0.0;  // |v_-^* - v_-| + |theta_-^* - theta_-|
  double contact = 0.0;            // |theta_+^* - theta_-^*|
  double rarefaction_plus = 0.0;   // |v_+^* - v_+| + |theta_+^* - theta_+|
  double total = 0.0;              // |(v_+ - v_-, u_+ - u_-, theta_+ - theta_-)|
};
WaveStrengths wave_strengths(const StarStates& stars, const EndStates& ends);

/// Inviscid self-similar Riemann solution at xi = x / t.
ThermoState riemann_fan_eval(const StarStates& stars, const EndStates& ends, double xi);

/// Builds end states by walking the curves forward from `left`: the 1-curve to
/// v_minus_star, a contact to theta_plus_star at equal pressure, then the
/// 3-curve from the right star state back to the right end volume v_plus.
/// With v_plus > v_+^* the result lies off the admissible region.
EndStates forward_construct(const ThermoState& left, double v_minus_star, double theta_plus_star,
                            double v_plus);

}  // namespace vpb
