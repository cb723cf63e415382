#pragma once

// Run configuration: a flat sectioned key = value text format.
//
//   # comment            ; comment
//   [section]
//   key = value
//
// Keys are only valid inside their section; unknown sections or keys are
// rejected. Values are numbers, booleans (true/false), words, or comma
// separated number lists.

#include <cstdint>
#include <string>
#include <vector>

#include "vpbwave/fluid.hpp"

namespace vpb {

enum class Scenario { riemann, ansatz, simulate, kinetic_check, fit };
const char* to_string(Scenario s);

struct StatesBlock {
  ThermoState left = make_state(3.0, 0.0, 1.0);
  ThermoState right = make_state(3.0, 0.0, 1.0);
  // construct = true: right state built from left by walking the wave curves,
  // with a contact jump and two rarefactions of relative size
  // rarefaction_ratio, scaled to total strength delta
  bool construct = false;
  double delta = 0.1;
  double rarefaction_ratio = 0.1;
  bool operator==(const StatesBlock&) const = default;
};

struct AnsatzBlock {
  std::vector<double> times{0.0, 10.0, 100.0, 1000.0};
  double window = 60.0;       // tables cover |x| <= window
  double table_h = 0.5;
  double fit_t0 = 10.0;
  double fit_t1 = 1000.0;
  int fit_points = 25;
  bool operator==(const AnsatzBlock&) const = default;
};

struct KineticBlock {
  int n = 16;                 // nodes per axis of the collision box
  double box_half_width = 6.0;  // box centred at 0
  int linear_n = 12;          // box nodes per axis for the assembled L_M, N_M
  int gh_points = 24;         // Gauss-Hermite points per axis for the basis check
  int pairs = 5;
  int samples = 20;
  double tol = 1e-9;
  bool operator==(const KineticBlock&) const = default;
};

struct FitBlock {
  std::string input;          // CSV with a header row
  std::string column = "linf_pert";
  double t0 = 10.0;
  double t1 = 200.0;
  bool operator==(const FitBlock&) const = default;
};

struct RunConfig {
  Scenario scenario = Scenario::simulate;
  std::uint64_t seed = 1;
  StatesBlock states;
  TransportModel transport;
  ContactOptions contact;
  SolverConfig solver;
  Perturbation perturbation;
  AnsatzBlock ansatz;
  KineticBlock kinetic;
  FitBlock fit;
  bool snapshot = true;       // final field snapshot from simulate

  void validate() const;      // throws ValidationError naming the key
  EndStates end_states() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// One key of the effective configuration; value rendered as in emit_config.
struct ConfigItem {
  enum class Type { number, integer, boolean, text, list };
  std::string section, key, value;
  Type type;
};
std::vector<ConfigItem> config_items(const RunConfig& cfg);

/// Effective configuration with every key, in the same grammar.
std::string emit_config(const RunConfig& cfg);

/// End states of a contact of relative jump s with two rarefactions of size
/// s * ratio, walked from `left`; scaled so the total strength is delta.
EndStates construct_end_states(const ThermoState& left, double delta, double ratio);

}  // namespace vpb
