#pragma once

// Norms of the perturbation around the composite wave, the fluid part of the
// energy functional, and log-log decay fits.

#include <string>
#include <vector>

#include "vpbwave/fluid.hpp"

namespace vpb {

struct DiagnosticsRecord {
  double t = 0.0;
  double l2_pert = 0.0;      // |(phi, psi, zeta)|_{L2}
  double h1_pert = 0.0;
  double linf_pert = 0.0;
  double l2_charge = 0.0;    // |(Phi_x, n2, n2_x)|_{L2}
  double linf_charge = 0.0;  // |(Phi_x, n2)|_inf
  double weighted_l2 = 0.0;  // int (phi^2 + |psi|^2 + zeta^2) w_hat^2 dx
  double energy_fluid = 0.0; // h1_pert^2 + l2_charge^2
  double min_v = 0.0;
  double min_theta = 0.0;
  double total_charge = 0.0; // sum n2 v h
};

/// Trapezoid-rule L2 norm of a nodal array.
double l2_norm(const std::vector<double>& f, double h);
/// Centered differences, one-sided at the ends.
std::vector<double> gradient(const std::vector<double>& f, double h);
double linf_norm(const std::vector<double>& f);

/// phi = v - V, psi = u - U (all three components), zeta = theta - Theta.
struct PerturbationFields {
  std::vector<double> phi, psi1, psi2, psi3, zeta;
};
PerturbationFields perturbation_fields(const FluidField& field, const CompositeWave& wave, double t);

/// Fills t, l2_pert, h1_pert, linf_pert and weighted_l2.
DiagnosticsRecord perturbation_norms(const FluidField& field, const CompositeWave& wave, double t,
                                     double alpha = 0.125);

/// |(Phi_x, n2, n2_x)|_{L2}^2 (charge part of the energy).
double charge_energy(const FluidField& field, const ChargeField& charge);

/// h1_pert^2 + |(Phi_x, n2, n2_x)|^2; the kinetic terms are not included.
double energy_fluid(const FluidField& field, const ChargeField& charge, const CompositeWave& wave, double t);

DiagnosticsRecord diagnostics_record(const FluidField& field, const ChargeField& charge, const CompositeWave& wave,
                                     double t, double alpha = 0.125);

struct DecayFit {
  double exponent = 0.0;
  double halfwidth = 0.0;  // 2 x standard error of the slope
  double intercept = 0.0;
  int points = 0;
};

/// Least-squares slope of log y against log(1 + t) over t in [t0, t1]. Needs
/// at least 10 points in the window; throws NonPositiveSeries if any y <= 0
/// there.
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1);

std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);
void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path);

}  // namespace vpb
