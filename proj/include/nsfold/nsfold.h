/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the nsfold library: truncated normal forms at
 * boundary-equilibrium and border-collision bifurcations, divergence
 * certificates, map iteration, parameter scans and experiment files.
 *
 * Objects are opaque handles released with their *_free function. Every
 * call returning nsf_status leaves a message for nsf_last_error() on
 * failure; the message is per thread. Matrices are row-major n x n.
 */
#ifndef NSFOLD_NSFOLD_H
#define NSFOLD_NSFOLD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NSF_API __declspec(dllexport)
#else
#define NSF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsf_status {
  NSF_OK = 0,
  NSF_ERR_INVALID_ARGUMENT = 1,
  NSF_ERR_DIMENSION_MISMATCH = 2,
  NSF_ERR_SINGULAR_MATRIX = 3,
  NSF_ERR_DEGENERATE_FORM = 4,
  NSF_ERR_NOT_A_FOLD = 5,
  NSF_ERR_INVALID_RESET_LAW = 6,
  NSF_ERR_NON_FINITE_STATE = 7,
  NSF_ERR_DEGENERATE_DENOMINATOR = 8,
  NSF_ERR_STEP_FAILURE = 9,
  NSF_ERR_CHATTER_BUDGET_EXCEEDED = 10,
  NSF_ERR_REPELLING_SLIDING = 11,
  NSF_ERR_CONFIG = 12,
  NSF_ERR_IO = 13,
  NSF_ERR_INTERNAL = 14
} nsf_status;

typedef enum nsf_beb_class { NSF_PERSISTENCE = 0, NSF_NONSMOOTH_FOLD = 1, NSF_DEGENERATE = 2 } nsf_beb_class;
typedef enum nsf_admissibility { NSF_ADMISSIBLE = 0, NSF_VIRTUAL = 1, NSF_BOUNDARY = 2 } nsf_admissibility;
typedef enum nsf_solution_kind { NSF_REGULAR_LEFT = 0, NSF_REGULAR_RIGHT = 1, NSF_PSEUDO = 2 } nsf_solution_kind;
typedef enum nsf_attractor_kind { NSF_PERIODIC = 0, NSF_APERIODIC = 1, NSF_DIVERGED = 2 } nsf_attractor_kind;

NSF_API const char* nsf_version(void);
NSF_API const char* nsf_status_string(nsf_status status);
/* Message of the last failing call on this thread ("" if none). */
NSF_API const char* nsf_last_error(void);

/* Linear algebra on row-major n x n matrices. */
NSF_API nsf_status nsf_determinant(size_t n, const double* a, double* det);
NSF_API nsf_status nsf_adjugate(size_t n, const double* a, double* adj);
NSF_API nsf_status nsf_first_row_of_adjugate(size_t n, const double* a, double* row);

/* Systems. */
typedef struct nsf_system nsf_system;

NSF_API nsf_status nsf_pwl_map_create(size_t n, const double* a_left, const double* a_right, const double* b,
                                      double mu, nsf_system** out);
NSF_API nsf_status nsf_pwl_ode_create(size_t n, const double* a_left, const double* a_right, const double* b,
                                      double mu, nsf_system** out);
NSF_API nsf_status nsf_filippov_create(size_t n, const double* a, const double* b, const double* c, double mu,
                                       nsf_system** out);
NSF_API nsf_status nsf_hybrid_create(size_t n, const double* a, const double* b, const double* c, double mu,
                                     nsf_system** out);
NSF_API nsf_status nsf_example_map_create(double delta_left, double delta_right, double alpha, double mu,
                                          nsf_system** out);
/* params = {tau_L, sigma_L, delta_L, tau_R, sigma_R, delta_R} */
NSF_API nsf_status nsf_bcnf3d_create(const double params[6], double mu, nsf_system** out);
NSF_API void nsf_system_free(nsf_system* sys);
NSF_API size_t nsf_system_dim(const nsf_system* sys);

/* Equilibrium / fixed-point report and certificate. */
typedef struct nsf_report nsf_report;

NSF_API nsf_status nsf_certify(const nsf_system* sys, nsf_report** out);
NSF_API void nsf_report_free(nsf_report* rep);
NSF_API nsf_beb_class nsf_report_class(const nsf_report* rep);
NSF_API double nsf_report_s(const nsf_report* rep);
NSF_API size_t nsf_report_solution_count(const nsf_report* rep);
/* location receives dim doubles. */
NSF_API nsf_status nsf_report_solution(const nsf_report* rep, size_t index, double* location,
                                       nsf_solution_kind* kind, nsf_admissibility* admissibility);
NSF_API int nsf_report_has_certificate(const nsf_report* rep);
/* direction receives dim doubles. */
NSF_API nsf_status nsf_report_certificate(const nsf_report* rep, double* direction, double* rate);

/* Map dynamics (map systems only). */
/* out receives (steps + 1) * dim doubles; *produced is the number of states
   written, smaller than steps + 1 when the orbit left the escape radius. */
NSF_API nsf_status nsf_map_iterate(const nsf_system* sys, const double* x0, size_t steps, double escape_radius,
                                   double* out, size_t* produced);
NSF_API nsf_status nsf_classify_attractor(const nsf_system* sys, const double* x0, size_t transient,
                                          size_t max_period, size_t budget, nsf_attractor_kind* kind,
                                          size_t* period);

/* Two-parameter scans of the 3D border-collision normal form. */
typedef struct nsf_scan nsf_scan;

typedef struct nsf_axis {
  const char* name; /* tau_L, sigma_L, delta_L, tau_R, sigma_R, delta_R or mu */
  double min;
  double max;
  size_t cells;
} nsf_axis;

NSF_API nsf_status nsf_scan2d_bcnf3d(const double base[6], double mu, nsf_axis x, nsf_axis y, size_t budget,
                                     size_t transient, size_t max_period, unsigned threads, nsf_scan** out);
NSF_API void nsf_scan_free(nsf_scan* scan);
NSF_API size_t nsf_scan_cell_count(const nsf_scan* scan);
NSF_API nsf_status nsf_scan_cell(const nsf_scan* scan, size_t index, double* px, double* py,
                                 nsf_attractor_kind* kind, size_t* period);
NSF_API nsf_status nsf_scan_write_csv(const nsf_scan* scan, const char* path);

/* Experiment files and the command workflows. */
typedef struct nsf_config nsf_config;

NSF_API nsf_status nsf_config_load(const char* path, nsf_config** out);
NSF_API nsf_status nsf_config_parse(const char* text, nsf_config** out);
NSF_API void nsf_config_free(nsf_config* cfg);
/* Normalized JSON; release with nsf_string_free. */
NSF_API nsf_status nsf_config_to_json(const nsf_config* cfg, char** json);
NSF_API void nsf_string_free(char* s);

typedef struct nsf_run_options {
  const char* out;  /* NULL: use the config value */
  size_t threads;   /* 0: use the config value */
  size_t budget;    /* used when has_budget != 0 */
  int has_budget;
  uint64_t seed;    /* used when has_seed != 0 */
  int has_seed;
} nsf_run_options;

/* Runs certify, orbit, flow, scan1d, scan2d, limit-cycle or tip. Returns
   NSF_OK whenever the command ran; its outcome is in *exit_code (0, 1, 2,
   64, 70 or 74) with stdout text and diagnostics as strings released by
   nsf_string_free. */
NSF_API nsf_status nsf_run_command(const nsf_config* cfg, const char* command, const nsf_run_options* options,
                                   int* exit_code, char** output, char** diagnostics);

#ifdef __cplusplus
}
#endif

#endif /* NSFOLD_NSFOLD_H */
