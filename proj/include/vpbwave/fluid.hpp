#pragma once

// Lagrangian Navier-Stokes-Poisson system with the leading-order n2
// drift-diffusion closure, on a uniform grid with far-field values pinned to
// the composite wave.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vpbwave/waves.hpp"

namespace vpb {

struct DiagnosticsRecord;

// gaussian: e^{-s^2}; dipole: sqrt(2e) s e^{-s^2} (zero mass); random: sums
// of seeded bumps. All scaled to sup = amplitude, s = (x - center) / width.
enum class PerturbationShape { gaussian, dipole, random };

struct Perturbation {
  PerturbationShape shape = PerturbationShape::gaussian;
  double amplitude = 0.01;
  double width = 5.0;
  double center = 0.0;
  std::uint64_t seed = 1;
};

struct SolverConfig {
  double h = 0.05;
  double X = 100.0;
  double dt = 0.0;    // 0: cfl * stable bound, recomputed every step
  double cfl = 0.8;
  double T = 200.0;
  TransportModel transport;
  double output_interval = 1.0;
  double neutrality_tol = 1e-10;
  double alpha = 0.125;  // weight exponent of weighted_l2
  int boundary_margin = 10;  // nodes kept clear of the outermost wave front

  void validate() const;  // throws ValidationError
  int nodes() const;      // 2X/h + 1
};

struct FluidField {
  double h = 0.0;
  std::vector<double> x;
  std::vector<double> v, u1, u2, u3, theta;
  std::size_t size() const { return x.size(); }
};

struct ChargeField {
  std::vector<double> n2;
  std::vector<double> Phi_x;
};

/// Nodal time derivatives.
struct FluidRates {
  std::vector<double> v, u1, u2, u3, theta, n2;
  std::vector<double> energy;  // (theta + |u|^2 / 2)_t
  std::vector<double> charge;  // (n2 v)_t
};

/// Phi_x(x) = v(x) * cumulative midpoint integral of 2 n2 v from -X; throws
/// NeutralityViolated if |sum n2 v h| > tol * |n2|_1.
std::vector<double> solve_poisson(const std::vector<double>& n2, const std::vector<double>& v, double h,
                                  double tol = 1e-10);

/// Field = ansatz at t = 0 plus the perturbation; n2 from the perturbed
/// electric field, projected to zero total charge; Phi_x from solve_poisson.
void init_from_ansatz(const CompositeWave& wave, const Perturbation& pert, const SolverConfig& cfg,
                      FluidField& field, ChargeField& charge);

/// Perturbation profiles on the grid. The charge is perturbed through the
/// electric field: n2 follows from efield by the discrete Poisson relation, so
/// Phi_x and n2 are both of size amplitude.
struct PerturbationProfiles {
  std::vector<double> phi, psi, zeta, efield;
};
PerturbationProfiles perturbation_profiles(const Perturbation& pert, const std::vector<double>& x);

/// Right-hand side with second-order centered fluxes. Boundary nodes get
/// zero rates (they are pinned by the stepper).
FluidRates rhs(const FluidField& field, const ChargeField& charge, const SolverConfig& cfg);

/// 0.4 h^2 min(v, v^2) / max(4 mu / 3, kappa, kappa1).
double stable_dt(const FluidField& field, const SolverConfig& cfg);

class FluidSolver {
 public:
  FluidSolver(const CompositeWave& wave, const SolverConfig& cfg, const Perturbation& pert);

  const FluidField& field() const { return field_; }
  const ChargeField& charge() const { return charge_; }
  const CompositeWave& wave() const { return wave_; }
  const SolverConfig& config() const { return cfg_; }
  double time() const { return t_; }
  long steps() const { return steps_; }

  /// Heun step with the Poisson field refreshed per stage. Throws
  /// StabilityViolation if dt exceeds the bound, PositivityViolation after a
  /// step that leaves v or theta nonpositive, BoundaryReached if the outer
  /// wave fronts come within the margin of the ends. On any throw the state
  /// stays at the last accepted step.
  void step(double dt);
  /// Step with the configured dt (or cfl times the bound).
  void step();

  /// Advances to cfg.T, calling `observe` at t = 0 and every output interval.
  std::vector<DiagnosticsRecord> run(const std::function<void(const DiagnosticsRecord&)>& observe = {});

  /// Outermost characteristic speed of the far-field states.
  double front_speed() const;

 private:
  void pin_boundary(FluidField& f, ChargeField& c, double t) const;
  void check_boundary(double t) const;

  CompositeWave wave_;
  SolverConfig cfg_;
  FluidField field_;
  ChargeField charge_;
  double t_ = 0.0;
  long steps_ = 0;
};

/// Snapshot CSV: x, v, u1, u2, u3, theta, n2, Phi_x.
void write_snapshot_csv(const FluidField& field, const ChargeField& charge, const std::string& path);

/// x_L(y) = int_0^y rho dy' by the trapezoid rule, with its inverse by
/// piecewise-linear interpolation (exact inverse of the forward interpolant).
class MassCoordinate {
 public:
  MassCoordinate(std::vector<double> y, const std::vector<double>& rho);
  double forward(double y) const;
  double inverse(double xl) const;
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& xl() const { return xl_; }

 private:
  std::vector<double> y_, xl_;
};

MassCoordinate lagrangian_coordinate(const std::vector<double>& y, const std::vector<double>& rho);

}  // namespace vpb
