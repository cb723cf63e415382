#pragma once

// Smooth wave profiles: Burgers-driven approximate rarefactions, the
// self-similar viscous contact wave, and their superposition.

#include <string>
#include <vector>

#include "vpbwave/eos.hpp"

namespace vpb {

/// Transport coefficients mu(theta) = mu0 sqrt(theta), kappa = kappa0 sqrt(theta),
/// kappa1 = kappa1_0 sqrt(theta).
struct TransportModel {
  double mu0 = 1.0;
  double kappa0 = 1.0;
  double kappa1_0 = 1.0;

  double mu(double theta) const;
  double kappa(double theta) const;
  double kappa1(double theta) const;
  double dkappa(double theta) const;
};

// ---------------------------------------------------------------- Burgers

struct BurgersWave {
  double w_l = 0.0;
  double w_r = 0.0;
};

/// Exact solution of w_t + w w_x = 0 with tanh initial data, by characteristics.
double burgers_w(double x, double t, const BurgersWave& wave);
double burgers_wx(double x, double t, const BurgersWave& wave);
double burgers_wxx(double x, double t, const BurgersWave& wave);

/// Foot of the characteristic through (x, t).
double burgers_foot(double x, double t, const BurgersWave& wave);

/// Inviscid Riemann solution of the same Burgers problem at xi = x / t.
double burgers_riemann(double xi, const BurgersWave& wave);

// ---------------------------------------------------------- rarefactions

/// Values and first derivatives of a single wave component.
struct WaveSample {
  double v = 0.0, u = 0.0, theta = 0.0;
  double v_x = 0.0, u_x = 0.0, theta_x = 0.0;
  double v_t = 0.0, u_t = 0.0, theta_t = 0.0;
};

struct RarefactionWave {
  Family family = Family::minus;
  double s = 0.0;
  ThermoState end;    // far-field state (left end for minus, right end for plus)
  double v_star = 1.0;
  BurgersWave burgers;

  static RarefactionWave build(Family family, const StarStates& stars, const EndStates& ends);
  WaveSample eval(double x, double t) const;
  ThermoState state(double x, double t) const;
};

/// U along the rarefaction curve in closed form (lambda is a power of v).
double rarefaction_u_exact(double v_start, double u_start, double v_end, double s, Family family);

ThermoState rarefaction_profile(double x, double t, const RarefactionWave& wave);

// ----------------------------------------------------------- contact wave

struct ContactOptions {
  double half_width = 12.0;
  int n = 4001;
  double tol = 1e-12;
  int max_iterations = 60;
};

struct ContactProfile {
  double theta_minus_star = 1.0;
  double theta_plus_star = 1.0;
  double p_star = 2.0 / 3.0;
  double u_star = 0.0;
  TransportModel transport;
  std::vector<double> eta;
  std::vector<double> Theta;
  std::vector<double> Theta_prime;
  // Distance to the nearer end temperature, accumulated from the tails so it
  // keeps relative precision where Theta itself has rounded to theta_pm.
  std::vector<double> deviation;
  double c1_est = 0.0;
  double c2_est = 0.0;
  int iterations = 0;
  double ode_residual = 0.0;

  double a(double theta) const;
  double da(double theta) const;
  double delta() const;
  bool trivial() const;

  struct Point {
    double theta;    // Theta(eta)
    double dtheta;   // Theta'(eta)
    double ddtheta;  // Theta''(eta)
    double dev;      // |Theta - theta_pm| toward the nearer side
  };
  Point at(double eta) const;
};

/// Solves -(eta/2) Theta' = (a(Theta) Theta')' with Theta(-inf) = theta_-^*,
/// Theta(+inf) = theta_+^*, a = 9 p kappa(Theta) / (10 Theta), by shooting
/// from eta = 0 on (Theta(0), Theta'(0)); also fits the Gaussian tail
/// constants.
ContactProfile contact_selfsimilar_solve(double theta_minus_star, double theta_plus_star,
                                         double p_star, const TransportModel& transport,
                                         const ContactOptions& opts = {});

/// Max over interior nodes of |-(eta/2)Theta' - (a Theta')'| with centered
/// second-order differences of the tabulated flux.
double contact_ode_residual(const ContactProfile& profile);

/// Writes eta, Theta, Theta_prime as CSV.
void write_contact_csv(const ContactProfile& profile, const std::string& path);

/// V, U and Theta of the contact wave with their derivatives.
WaveSample contact_eval(const ContactProfile& profile, double x, double t);

// ---------------------------------------------------------- tail envelope

struct TailSample {
  double x = 0.0;
  double dev = 0.0;      // |Theta - theta_pm|
  double theta_x = 0.0;
  double theta_xx = 0.0;
};

struct TailCheck {
  bool pass = false;
  double worst_ratio = 0.0;  // max of lhs / (c1 delta exp(-c2 x^2/(1+t)))
  double tightest_c2 = 0.0;  // largest c2 passing with the given c1
};

/// Checks dev + sqrt(1+t)|Theta_x| + (1+t)|Theta_xx| <= c1 delta exp(-c2 x^2 / (1+t)).
TailCheck gaussian_tail_check(const std::vector<TailSample>& samples, double t, double c1,
                              double c2, double delta);

/// Samples the contact wave at time t on |x| <= 10 sqrt(1+t).
std::vector<TailSample> contact_tail_samples(const ContactProfile& profile, double t, int count = 2001);

// ---------------------------------------------------------- composite wave

struct CompositeWave {
  EndStates ends;
  StarStates stars;
  RarefactionWave rare_minus;
  RarefactionWave rare_plus;
  ContactProfile contact;
  TransportModel transport;

  static CompositeWave build(const EndStates& ends, const TransportModel& transport,
                             const ContactOptions& contact_opts = {},
                             const StarSolveOptions& star_opts = {});

  WaveSample sample(double x, double t) const;
  ThermoState eval(double x, double t) const;
};

ThermoState composite_eval(const CompositeWave& wave, double x, double t);

struct CompositeResiduals {
  double mass = 0.0;
  double momentum = 0.0;
  double transverse = 0.0;
  double energy = 0.0;
  double r1 = 0.0;  // contact-only momentum defect
  double r2 = 0.0;  // contact-only energy defect
};

/// Residuals of the ansatz in the viscous system at (x, t); x-derivatives by
/// fourth-order centered differences with step hx, t-derivatives analytic.
CompositeResiduals composite_residuals(const CompositeWave& wave, double x, double t, double hx = 1e-2);

/// Contact-only R1 = U_t - (4/3)(mu/V U_x)_x.
double contact_r1(const ContactProfile& profile, double x, double t, double hx);

// ---------------------------------------------------------- regions, weights

enum class Region { omega_minus, omega_c, omega_plus };
const char* to_string(Region r);

Region region_classify(const StarStates& stars, double x, double t);

/// (1+t)^{-1/2} exp(-alpha x^2 / (1+t)).
double weight_hat_w(double x, double t, double alpha);

/// Integral of weight_hat_w from -inf to x.
double weight_hat_g(double x, double t, double alpha);

double c0_constant(const StarStates& stars, double c1);

}  // namespace vpb
