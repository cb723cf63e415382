#ifndef VPBWAVE_H
#define VPBWAVE_H

/* C interface of the vpbwave library. All objects are opaque handles;
   every fallible call returns a vpb_status, and the message of the last
   failure on the calling thread is available from vpb_last_error(). */

#include <stddef.h>
#include <stdint.h>

#if defined(VPB_BUILDING_LIBRARY)
#define VPB_API __attribute__((visibility("default")))
#else
#define VPB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vpb_status {
  VPB_OK = 0,
  VPB_ERR_DOMAIN = 1,
  VPB_ERR_NO_SOLUTION = 2,
  VPB_ERR_CONVERGENCE = 3,
  VPB_ERR_NONPHYSICAL_MOMENTS = 4,
  VPB_ERR_NOT_MICROSCOPIC = 5,
  VPB_ERR_POSITIVITY = 6,
  VPB_ERR_STABILITY = 7,
  VPB_ERR_NEUTRALITY = 8,
  VPB_ERR_BOUNDARY_REACHED = 9,
  VPB_ERR_NONPOSITIVE_SERIES = 10,
  VPB_ERR_PARSE = 11,
  VPB_ERR_VALIDATION = 12,
  VPB_ERR_IO = 13,
  VPB_ERR_INVALID_ARGUMENT = 14,
  VPB_ERR_INTERNAL = 15
} vpb_status;

typedef struct vpb_config vpb_config;
typedef struct vpb_wave vpb_wave;
typedef struct vpb_solver vpb_solver;

VPB_API const char* vpb_version(void);
VPB_API const char* vpb_status_name(vpb_status s);
/* 1 for parse and validation errors (bad input), 0 otherwise. */
VPB_API int vpb_status_is_config_error(vpb_status s);

/* Thread-local details of the last failure. Line/column are 0 unless the
   failure was a parse error; the key is empty unless it was a validation
   error. */
VPB_API const char* vpb_last_error(void);
VPB_API int vpb_last_error_line(void);
VPB_API int vpb_last_error_column(void);
VPB_API const char* vpb_last_error_key(void);

/* Strings returned through char** outputs are owned by the caller. */
VPB_API void vpb_string_free(char* s);

/* Worker threads for the kinetic sweeps (0 restores the default). */
VPB_API vpb_status vpb_set_threads(int n);

/* ---- configuration */
VPB_API vpb_status vpb_config_default(vpb_config** out);
VPB_API vpb_status vpb_config_parse(const char* text, vpb_config** out);
VPB_API vpb_status vpb_config_load(const char* path, vpb_config** out);
VPB_API void vpb_config_free(vpb_config* cfg);
VPB_API vpb_status vpb_config_set_seed(vpb_config* cfg, uint64_t seed);
/* riemann, ansatz, simulate, kinetic-check or fit */
VPB_API vpb_status vpb_config_set_scenario(vpb_config* cfg, const char* name);
VPB_API vpb_status vpb_config_emit(const vpb_config* cfg, char** text);

/* Runs the configured scenario, writing its files into outdir. The JSON
   summary is returned in *summary when summary is not NULL. */
VPB_API vpb_status vpb_run(const vpb_config* cfg, const char* outdir, char** summary);

/* ---- composite wave */
VPB_API vpb_status vpb_wave_create(const vpb_config* cfg, vpb_wave** out);
VPB_API void vpb_wave_free(vpb_wave* w);
/* out = (v, u1, theta) */
VPB_API vpb_status vpb_wave_eval(const vpb_wave* w, double x, double t, double out[3]);
/* out = (v_minus_star, v_plus_star, u_star, theta_minus_star, theta_plus_star, p_star) */
VPB_API vpb_status vpb_wave_stars(const vpb_wave* w, double out[6]);

/* ---- fluid solver */
VPB_API vpb_status vpb_solver_create(const vpb_config* cfg, vpb_solver** out);
VPB_API void vpb_solver_free(vpb_solver* s);
VPB_API vpb_status vpb_solver_step(vpb_solver* s, int steps);
VPB_API vpb_status vpb_solver_time(const vpb_solver* s, double* t);
VPB_API vpb_status vpb_solver_size(const vpb_solver* s, size_t* n);
/* name: x, v, u1, u2, u3, theta, n2, Phi_x; len must equal the node count */
VPB_API vpb_status vpb_solver_field(const vpb_solver* s, const char* name, double* buf, size_t len);
/* out = (t, l2_pert, h1_pert, linf_pert, l2_charge, linf_charge, weighted_l2,
          energy_fluid, min_v, min_theta, total_charge) */
VPB_API vpb_status vpb_solver_diagnostics(const vpb_solver* s, double out[11]);

#ifdef __cplusplus
}
#endif

#endif
