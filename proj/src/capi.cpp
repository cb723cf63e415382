#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "commands.hpp"
#include "vpbwave/diagnostics.hpp"
#include "vpbwave/errors.hpp"
#include "vpbwave/parallel.hpp"
#include "vpbwave/vpbwave.h"

struct vpb_config {
  vpb::RunConfig cfg;
};

struct vpb_wave {
  vpb::CompositeWave wave;
};

struct vpb_solver {
  std::unique_ptr<vpb::FluidSolver> solver;
};

namespace {

struct LastError {
  std::string message;
  std::string key;
  int line = 0;
  int column = 0;
};

thread_local LastError g_last;

vpb_status status_of(vpb::ErrorKind k) {
  switch (k) {
    case vpb::ErrorKind::domain: return VPB_ERR_DOMAIN;
    case vpb::ErrorKind::no_solution: return VPB_ERR_NO_SOLUTION;
    case vpb::ErrorKind::convergence: return VPB_ERR_CONVERGENCE;
    case vpb::ErrorKind::nonphysical_moments: return VPB_ERR_NONPHYSICAL_MOMENTS;
    case vpb::ErrorKind::not_microscopic: return VPB_ERR_NOT_MICROSCOPIC;
    case vpb::ErrorKind::positivity: return VPB_ERR_POSITIVITY;
    case vpb::ErrorKind::stability: return VPB_ERR_STABILITY;
    case vpb::ErrorKind::neutrality: return VPB_ERR_NEUTRALITY;
    case vpb::ErrorKind::boundary_reached: return VPB_ERR_BOUNDARY_REACHED;
    case vpb::ErrorKind::nonpositive_series: return VPB_ERR_NONPOSITIVE_SERIES;
    case vpb::ErrorKind::parse: return VPB_ERR_PARSE;
    case vpb::ErrorKind::validation: return VPB_ERR_VALIDATION;
    case vpb::ErrorKind::io: return VPB_ERR_IO;
  }
  return VPB_ERR_INTERNAL;
}

vpb_status fail(vpb_status s, const std::string& msg) {
  g_last = LastError{};
  g_last.message = msg;
  return s;
}

// Runs f, mapping exceptions to status codes.
template <class F>
vpb_status guarded(F&& f) {
  try {
    f();
    g_last = LastError{};
    return VPB_OK;
  } catch (const vpb::ParseError& e) {
    const vpb_status s = fail(VPB_ERR_PARSE, e.what());
    g_last.line = e.line();
    g_last.column = e.column();
    return s;
  } catch (const vpb::ValidationError& e) {
    const vpb_status s = fail(VPB_ERR_VALIDATION, e.what());
    g_last.key = e.key();
    return s;
  } catch (const vpb::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VPB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VPB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VPB_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* vpb_version(void) { return vpb::version_string(); }

const char* vpb_status_name(vpb_status s) {
  switch (s) {
    case VPB_OK: return "ok";
    case VPB_ERR_DOMAIN: return "domain";
    case VPB_ERR_NO_SOLUTION: return "no_solution";
    case VPB_ERR_CONVERGENCE: return "convergence";
    case VPB_ERR_NONPHYSICAL_MOMENTS: return "nonphysical_moments";
    case VPB_ERR_NOT_MICROSCOPIC: return "not_microscopic";
    case VPB_ERR_POSITIVITY: return "positivity";
    case VPB_ERR_STABILITY: return "stability";
    case VPB_ERR_NEUTRALITY: return "neutrality";
    case VPB_ERR_BOUNDARY_REACHED: return "boundary_reached";
    case VPB_ERR_NONPOSITIVE_SERIES: return "nonpositive_series";
    case VPB_ERR_PARSE: return "parse";
    case VPB_ERR_VALIDATION: return "validation";
    case VPB_ERR_IO: return "io";
    case VPB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case VPB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int vpb_status_is_config_error(vpb_status s) { return s == VPB_ERR_PARSE || s == VPB_ERR_VALIDATION; }

const char* vpb_last_error(void) { return g_last.message.c_str(); }
int vpb_last_error_line(void) { return g_last.line; }
int vpb_last_error_column(void) { return g_last.column; }
const char* vpb_last_error_key(void) { return g_last.key.c_str(); }

void vpb_string_free(char* s) { std::free(s); }

vpb_status vpb_set_threads(int n) {
  if (n < 0) return fail(VPB_ERR_INVALID_ARGUMENT, "thread count must be nonnegative");
  vpb::set_thread_count(n);
  return VPB_OK;
}

vpb_status vpb_config_default(vpb_config** out) {
  if (!out) return fail(VPB_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new vpb_config{}; });
}

vpb_status vpb_config_parse(const char* text, vpb_config** out) {
  if (!text || !out) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new vpb_config{vpb::parse_config_text(text)}; });
}

vpb_status vpb_config_load(const char* path, vpb_config** out) {
  if (!path || !out) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new vpb_config{vpb::parse_config(path)}; });
}

void vpb_config_free(vpb_config* cfg) { delete cfg; }

vpb_status vpb_config_set_seed(vpb_config* cfg, uint64_t seed) {
  if (!cfg) return fail(VPB_ERR_INVALID_ARGUMENT, "null config");
  cfg->cfg.seed = seed;
  cfg->cfg.perturbation.seed = seed;
  return VPB_OK;
}

vpb_status vpb_config_set_scenario(vpb_config* cfg, const char* name) {
  if (!cfg || !name) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  for (vpb::Scenario s : {vpb::Scenario::riemann, vpb::Scenario::ansatz, vpb::Scenario::simulate,
                          vpb::Scenario::kinetic_check, vpb::Scenario::fit})
    if (std::strcmp(name, vpb::to_string(s)) == 0) {
      cfg->cfg.scenario = s;
      return VPB_OK;
    }
  return fail(VPB_ERR_INVALID_ARGUMENT, std::string("unknown scenario '") + name + "'");
}

vpb_status vpb_config_emit(const vpb_config* cfg, char** text) {
  if (!cfg || !text) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *text = dup(vpb::emit_config(cfg->cfg)); });
}

vpb_status vpb_run(const vpb_config* cfg, const char* outdir, char** summary) {
  if (!cfg || !outdir) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string s = vpb::run_scenario(cfg->cfg, outdir);
    if (summary) *summary = dup(s);
  });
}

vpb_status vpb_wave_create(const vpb_config* cfg, vpb_wave** out) {
  if (!cfg || !out) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& c = cfg->cfg;
    *out = new vpb_wave{vpb::CompositeWave::build(c.end_states(), c.transport, c.contact)};
  });
}

void vpb_wave_free(vpb_wave* w) { delete w; }

vpb_status vpb_wave_eval(const vpb_wave* w, double x, double t, double out[3]) {
  if (!w || !out) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const vpb::ThermoState s = w->wave.eval(x, t);
    out[0] = s.v;
    out[1] = s.u[0];
    out[2] = s.theta;
  });
}

vpb_status vpb_wave_stars(const vpb_wave* w, double out[6]) {
  if (!w || !out) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  const auto& s = w->wave.stars;
  out[0] = s.v_minus_star;
  out[1] = s.v_plus_star;
  out[2] = s.u_star;
  out[3] = s.theta_minus_star;
  out[4] = s.theta_plus_star;
  out[5] = s.p_star;
  return VPB_OK;
}

vpb_status vpb_solver_create(const vpb_config* cfg, vpb_solver** out) {
  if (!cfg || !out) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& c = cfg->cfg;
    c.validate();
    const auto wave = vpb::CompositeWave::build(c.end_states(), c.transport, c.contact);
    vpb::Perturbation p = c.perturbation;
    p.seed = c.seed;
    *out = new vpb_solver{std::make_unique<vpb::FluidSolver>(wave, c.solver, p)};
  });
}

void vpb_solver_free(vpb_solver* s) { delete s; }

vpb_status vpb_solver_step(vpb_solver* s, int steps) {
  if (!s || steps < 0) return fail(VPB_ERR_INVALID_ARGUMENT, "null solver or negative step count");
  return guarded([&] {
    for (int i = 0; i < steps; ++i) s->solver->step();
  });
}

vpb_status vpb_solver_time(const vpb_solver* s, double* t) {
  if (!s || !t) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  *t = s->solver->time();
  return VPB_OK;
}

vpb_status vpb_solver_size(const vpb_solver* s, size_t* n) {
  if (!s || !n) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  *n = s->solver->field().size();
  return VPB_OK;
}

vpb_status vpb_solver_field(const vpb_solver* s, const char* name, double* buf, size_t len) {
  if (!s || !name || !buf) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  const auto& f = s->solver->field();
  const auto& c = s->solver->charge();
  const std::vector<double>* src = nullptr;
  const std::string n = name;
  if (n == "x") src = &f.x;
  else if (n == "v") src = &f.v;
  else if (n == "u1") src = &f.u1;
  else if (n == "u2") src = &f.u2;
  else if (n == "u3") src = &f.u3;
  else if (n == "theta") src = &f.theta;
  else if (n == "n2") src = &c.n2;
  else if (n == "Phi_x") src = &c.Phi_x;
  if (!src) return fail(VPB_ERR_INVALID_ARGUMENT, "unknown field '" + n + "'");
  if (len != src->size()) return fail(VPB_ERR_INVALID_ARGUMENT, "buffer length does not match the node count");
  std::memcpy(buf, src->data(), len * sizeof(double));
  return VPB_OK;
}

vpb_status vpb_solver_diagnostics(const vpb_solver* s, double out[11]) {
  if (!s || !out) return fail(VPB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& sv = *s->solver;
    const vpb::DiagnosticsRecord r =
        vpb::diagnostics_record(sv.field(), sv.charge(), sv.wave(), sv.time(), sv.config().alpha);
    const double v[11] = {r.t,           r.l2_pert,    r.h1_pert, r.linf_pert, r.l2_charge,   r.linf_charge,
                          r.weighted_l2, r.energy_fluid, r.min_v, r.min_theta, r.total_charge};
    std::memcpy(out, v, sizeof v);
  });
}

}  // extern "C"
