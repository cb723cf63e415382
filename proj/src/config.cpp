#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "vpbwave/config.hpp"
#include "vpbwave/errors.hpp"

namespace vpb {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::riemann: return "riemann";
    case Scenario::ansatz: return "ansatz";
    case Scenario::simulate: return "simulate";
    case Scenario::kinetic_check: return "kinetic-check";
    case Scenario::fit: return "fit";
  }
  return "?";
}

namespace {

enum class Kind { number, integer, u64, boolean, word, list, scenario, shape };

struct Entry {
  const char* section;
  const char* key;
  Kind kind;
  void* ptr;
};

std::vector<Entry> entries(RunConfig& c) {
  return {
      {"run", "scenario", Kind::scenario, &c.scenario},
      {"run", "seed", Kind::u64, &c.seed},
      {"states", "left_v", Kind::number, &c.states.left.v},
      {"states", "left_u", Kind::number, &c.states.left.u[0]},
      {"states", "left_theta", Kind::number, &c.states.left.theta},
      {"states", "right_v", Kind::number, &c.states.right.v},
      {"states", "right_u", Kind::number, &c.states.right.u[0]},
      {"states", "right_theta", Kind::number, &c.states.right.theta},
      {"states", "construct", Kind::boolean, &c.states.construct},
      {"states", "delta", Kind::number, &c.states.delta},
      {"states", "rarefaction_ratio", Kind::number, &c.states.rarefaction_ratio},
      {"transport", "mu0", Kind::number, &c.transport.mu0},
      {"transport", "kappa0", Kind::number, &c.transport.kappa0},
      {"transport", "kappa1_0", Kind::number, &c.transport.kappa1_0},
      {"contact", "half_width", Kind::number, &c.contact.half_width},
      {"contact", "n", Kind::integer, &c.contact.n},
      {"contact", "tol", Kind::number, &c.contact.tol},
      {"solver", "h", Kind::number, &c.solver.h},
      {"solver", "X", Kind::number, &c.solver.X},
      {"solver", "dt", Kind::number, &c.solver.dt},
      {"solver", "cfl", Kind::number, &c.solver.cfl},
      {"solver", "T", Kind::number, &c.solver.T},
      {"solver", "neutrality_tol", Kind::number, &c.solver.neutrality_tol},
      {"solver", "boundary_margin", Kind::integer, &c.solver.boundary_margin},
      {"perturbation", "shape", Kind::shape, &c.perturbation.shape},
      {"perturbation", "amplitude", Kind::number, &c.perturbation.amplitude},
      {"perturbation", "width", Kind::number, &c.perturbation.width},
      {"perturbation", "center", Kind::number, &c.perturbation.center},
      {"output", "interval", Kind::number, &c.solver.output_interval},
      {"output", "snapshot", Kind::boolean, &c.snapshot},
      {"diagnostics", "alpha", Kind::number, &c.solver.alpha},
      {"ansatz", "times", Kind::list, &c.ansatz.times},
      {"ansatz", "window", Kind::number, &c.ansatz.window},
      {"ansatz", "table_h", Kind::number, &c.ansatz.table_h},
      {"ansatz", "fit_t0", Kind::number, &c.ansatz.fit_t0},
      {"ansatz", "fit_t1", Kind::number, &c.ansatz.fit_t1},
      {"ansatz", "fit_points", Kind::integer, &c.ansatz.fit_points},
      {"kinetic", "n", Kind::integer, &c.kinetic.n},
      {"kinetic", "box_half_width", Kind::number, &c.kinetic.box_half_width},
      {"kinetic", "linear_n", Kind::integer, &c.kinetic.linear_n},
      {"kinetic", "gh_points", Kind::integer, &c.kinetic.gh_points},
      {"kinetic", "pairs", Kind::integer, &c.kinetic.pairs},
      {"kinetic", "samples", Kind::integer, &c.kinetic.samples},
      {"kinetic", "tol", Kind::number, &c.kinetic.tol},
      {"fit", "input", Kind::word, &c.fit.input},
      {"fit", "column", Kind::word, &c.fit.column},
      {"fit", "t0", Kind::number, &c.fit.t0},
      {"fit", "t1", Kind::number, &c.fit.t1},
  };
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

template <class Int>
bool parse_int(const std::string& s, Int& out) {
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

void assign(const Entry& e, const std::string& value, int line, int col) {
  auto fail = [&](const char* what) {
    throw ParseError(std::string(e.section) + "." + e.key + ": " + what + " '" + value + "'", line, col);
  };
  switch (e.kind) {
    case Kind::number:
      if (!parse_double(value, *static_cast<double*>(e.ptr))) fail("expected a number, got");
      break;
    case Kind::integer:
      if (!parse_int(value, *static_cast<int*>(e.ptr))) fail("expected an integer, got");
      break;
    case Kind::u64:
      if (!parse_int(value, *static_cast<std::uint64_t*>(e.ptr))) fail("expected a nonnegative integer, got");
      break;
    case Kind::boolean:
      if (value == "true" || value == "on" || value == "1")
        *static_cast<bool*>(e.ptr) = true;
      else if (value == "false" || value == "off" || value == "0")
        *static_cast<bool*>(e.ptr) = false;
      else
        fail("expected true or false, got");
      break;
    case Kind::word:
      *static_cast<std::string*>(e.ptr) = value;
      break;
    case Kind::list: {
      std::vector<double> out;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double d;
        if (!parse_double(trim(item), d)) fail("expected a comma separated number list, got");
        out.push_back(d);
      }
      *static_cast<std::vector<double>*>(e.ptr) = out;
      break;
    }
    case Kind::scenario: {
      auto& s = *static_cast<Scenario*>(e.ptr);
      for (Scenario k : {Scenario::riemann, Scenario::ansatz, Scenario::simulate, Scenario::kinetic_check,
                         Scenario::fit})
        if (value == to_string(k)) {
          s = k;
          return;
        }
      fail("unknown scenario");
      break;
    }
    case Kind::shape:
      if (value == "gaussian")
        *static_cast<PerturbationShape*>(e.ptr) = PerturbationShape::gaussian;
      else if (value == "dipole")
        *static_cast<PerturbationShape*>(e.ptr) = PerturbationShape::dipole;
      else if (value == "random")
        *static_cast<PerturbationShape*>(e.ptr) = PerturbationShape::random;
      else
        fail("unknown shape");
      break;
  }
}

std::string num(double x) {
  // shortest text that parses back to the same double
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string render(const Entry& e) {
  switch (e.kind) {
    case Kind::number: return num(*static_cast<const double*>(e.ptr));
    case Kind::integer: return std::to_string(*static_cast<const int*>(e.ptr));
    case Kind::u64: return std::to_string(*static_cast<const std::uint64_t*>(e.ptr));
    case Kind::boolean: return *static_cast<const bool*>(e.ptr) ? "true" : "false";
    case Kind::word: return *static_cast<const std::string*>(e.ptr);
    case Kind::list: {
      std::string s;
      for (double d : *static_cast<const std::vector<double>*>(e.ptr)) s += (s.empty() ? "" : ", ") + num(d);
      return s;
    }
    case Kind::scenario: return to_string(*static_cast<const Scenario*>(e.ptr));
    case Kind::shape:
      switch (*static_cast<const PerturbationShape*>(e.ptr)) {
        case PerturbationShape::gaussian: return "gaussian";
        case PerturbationShape::dipole: return "dipole";
        case PerturbationShape::random: return "random";
      }
      return "";
  }
  return "";
}

void check_state(const ThermoState& s, const char* side) {
  const std::string k = std::string("states.") + side;
  if (!(s.v > 0.0)) throw ValidationError(k + "_v", "v must be positive");
  if (!(s.theta > 0.0)) throw ValidationError(k + "_theta", "theta must be positive");
}

}  // namespace

EndStates construct_end_states(const ThermoState& left, double delta, double ratio) {
  if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
  if (!(ratio >= 0.0 && ratio < 1.0)) throw DomainError("rarefaction ratio must lie in [0, 1)");
  auto build = [&](double s) {
    const double vms = left.v * (1.0 + s * ratio);
    const double tms = theta_from_vs(vms, entropy(left));
    const double tps = tms * (1.0 + s);
    const double vps = vms * tps / tms;
    return forward_construct(left, vms, tps, vps * (1.0 - s * ratio));
  };
  auto total = [&](double s) {
    const EndStates e = build(s);
    const double a = e.right.v - e.left.v, b = e.right.u[0] - e.left.u[0], c = e.right.theta - e.left.theta;
    return std::sqrt(a * a + b * b + c * c);
  };
  if (delta == 0.0) return EndStates{left, left};
  double lo = 0.0, hi = 1.0;
  while (total(hi) < delta) {
    hi *= 2.0;
    if (hi > 64.0) throw DomainError("cannot reach the requested total strength");
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double m = 0.5 * (lo + hi);
    (total(m) < delta ? lo : hi) = m;
  }
  return build(0.5 * (lo + hi));
}

void RunConfig::validate() const {
  check_state(states.left, "left");
  if (!states.construct) check_state(states.right, "right");
  if (states.construct) {
    if (!(states.delta >= 0.0)) throw ValidationError("states.delta", "delta must be nonnegative");
    if (!(states.rarefaction_ratio >= 0.0 && states.rarefaction_ratio < 1.0))
      throw ValidationError("states.rarefaction_ratio", "rarefaction_ratio must lie in [0, 1)");
  }
  if (!(contact.half_width > 0.0)) throw ValidationError("contact.half_width", "half_width must be positive");
  if (contact.n < 101) throw ValidationError("contact.n", "n must be at least 101");
  if (!(contact.tol > 0.0)) throw ValidationError("contact.tol", "tol must be positive");
  solver.validate();
  if (!(perturbation.amplitude >= 0.0)) throw ValidationError("perturbation.amplitude", "amplitude must be nonnegative");
  if (!(perturbation.width > 0.0)) throw ValidationError("perturbation.width", "width must be positive");
  if (ansatz.times.empty()) throw ValidationError("ansatz.times", "times must not be empty");
  for (double t : ansatz.times)
    if (!(t >= 0.0)) throw ValidationError("ansatz.times", "times must be nonnegative");
  if (!(ansatz.window > 0.0)) throw ValidationError("ansatz.window", "window must be positive");
  if (!(ansatz.table_h > 0.0)) throw ValidationError("ansatz.table_h", "table_h must be positive");
  if (!(ansatz.fit_t0 >= 0.0 && ansatz.fit_t1 > ansatz.fit_t0))
    throw ValidationError("ansatz.fit_t1", "fit window must satisfy 0 <= fit_t0 < fit_t1");
  if (ansatz.fit_points < 10) throw ValidationError("ansatz.fit_points", "fit_points must be at least 10");
  if (kinetic.n < 4 || kinetic.n > 64) throw ValidationError("kinetic.n", "n must lie in [4, 64]");
  if (kinetic.linear_n < 4 || kinetic.linear_n > 24) throw ValidationError("kinetic.linear_n", "linear_n must lie in [4, 24]");
  if (!(kinetic.box_half_width > 0.0)) throw ValidationError("kinetic.box_half_width", "box_half_width must be positive");
  if (kinetic.gh_points < 2 || kinetic.gh_points > 64)
    throw ValidationError("kinetic.gh_points", "gh_points must lie in [2, 64]");
  if (kinetic.pairs < 1) throw ValidationError("kinetic.pairs", "pairs must be positive");
  if (kinetic.samples < 1) throw ValidationError("kinetic.samples", "samples must be positive");
  if (!(kinetic.tol > 0.0)) throw ValidationError("kinetic.tol", "tol must be positive");
  if (!(fit.t1 > fit.t0)) throw ValidationError("fit.t1", "fit window must satisfy t0 < t1");
  if (scenario == Scenario::fit && fit.input.empty()) throw ValidationError("fit.input", "fit needs an input file");
}

EndStates RunConfig::end_states() const {
  if (states.construct) return construct_end_states(states.left, states.delta, states.rarefaction_ratio);
  return EndStates{states.left, states.right};
}

bool operator==(const RunConfig& a, const RunConfig& b) { return emit_config(a) == emit_config(b); }

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  const auto table = entries(cfg);
  std::set<std::string> sections, seen;
  for (const auto& e : table) sections.insert(e.section);
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // comments start at # or ; anywhere outside a value
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    const std::string t = trim(s);
    if (t.empty()) continue;
    const int col0 = static_cast<int>(s.find_first_not_of(" \t")) + 1;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("section header is missing ']'", line, col0 + static_cast<int>(t.size()));
      section = trim(t.substr(1, t.size() - 2));
      if (!sections.count(section)) throw ParseError("unknown section [" + section + "]", line, col0 + 1);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line, col0);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key before '='", line, static_cast<int>(eq) + 1);
    if (section.empty()) throw ParseError("key '" + key + "' appears before any [section]", line, col0);
    const std::string full = section + "." + key;
    const Entry* hit = nullptr;
    for (const auto& e : table)
      if (section == e.section && key == e.key) hit = &e;
    if (!hit) throw ValidationError(full, "unknown key '" + full + "' on line " + std::to_string(line));
    if (!seen.insert(full).second) throw ParseError("duplicate key '" + full + "'", line, col0);
    const auto vpos = s.find_first_not_of(" \t", eq + 1);
    const int vcol = vpos == std::string::npos ? static_cast<int>(s.size()) + 1 : static_cast<int>(vpos) + 1;
    if (value.empty()) throw ParseError("missing value for '" + full + "'", line, vcol);
    assign(*hit, value, line, vcol);
  }
  cfg.perturbation.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<ConfigItem> config_items(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::vector<ConfigItem> out;
  for (const auto& e : entries(copy)) {
    ConfigItem it{e.section, e.key, render(e), ConfigItem::Type::text};
    switch (e.kind) {
      case Kind::number: it.type = ConfigItem::Type::number; break;
      case Kind::integer:
      case Kind::u64: it.type = ConfigItem::Type::integer; break;
      case Kind::boolean: it.type = ConfigItem::Type::boolean; break;
      case Kind::list: it.type = ConfigItem::Type::list; break;
      default: break;
    }
    out.push_back(std::move(it));
  }
  return out;
}

std::string emit_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::string out, section;
  for (const auto& e : entries(copy)) {
    if (section != e.section) {
      section = e.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    const std::string value = render(e);
    if (value.empty()) continue;  // unset word: the default on reparse
    out += std::string(e.key) + " = " + value + "\n";
  }
  return out;
}

}  // namespace vpb
