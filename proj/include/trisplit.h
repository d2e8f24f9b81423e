#ifndef TRISPLIT_H
#define TRISPLIT_H

/* trisplit — proximal splitting solver for  min F(Ax) + G(y) + H(x,y)
 *
 * C interface of the shared library. All functions are thread-safe; handles
 * must not be shared between threads without external synchronization, but
 * distinct handles may be used concurrently. Functions returning ts_status
 * set a thread-local error message retrievable via ts_last_error().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define TRISPLIT_API __declspec(dllexport)
#else
#  define TRISPLIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The first five mirror the CLI exit codes. */
typedef enum ts_status {
  TS_OK = 0,
  TS_ERR_CONFIG = 1,
  TS_MAX_ITERATIONS = 2,
  TS_ASSUMPTION_VIOLATION = 3,
  TS_DIVERGENCE = 4,
  TS_ERR_DIMENSION = 10,
  TS_ERR_NOT_SURJECTIVE = 11,
  TS_ERR_INVALID_ARGUMENT = 12,
  TS_ERR_EMPTY_INTERVAL = 13,
  TS_ERR_TOO_SHORT = 14,
  TS_ERR_NOT_CONVERGED = 15,
  TS_ERR_GRID_TOO_LARGE = 16,
  TS_ERR_IO = 17,
  TS_ERR_INTERNAL = 99
} ts_status;

/* Opaque handles. */
typedef struct ts_problem ts_problem; /* problem instance (oracles + operator) */
typedef struct ts_run ts_run;         /* finished solver run (trace + constants) */

/* Step sizes (mu, tau), penalty (beta) and dual relaxation (sigma). */
typedef struct ts_params {
  double mu;
  double beta;
  double tau;
  double sigma;
} ts_params;

typedef struct ts_stopping {
  uint64_t max_iterations;
  double step_tol;          /* threshold on max step norm; <= 0 disables */
  double kkt_tol;           /* additional KKT threshold; <= 0 disables */
  double divergence_guard;  /* abort when the state norm exceeds this; <= 0: 1e12 */
} ts_stopping;

/* One per-iteration trace record. */
typedef struct ts_record {
  uint64_t n;
  double psi;          /* regularized augmented Lagrangian */
  double lagrangian;   /* augmented Lagrangian */
  double objective;    /* F(Ax) ... evaluated as F(z) + G(y) + H(x,y) */
  double feasibility;  /* ||Ax - z|| */
  double dx, dy, dz, du;
  double subgrad_norm; /* norm of the explicit subgradient element */
  double kkt_grad_x, kkt_y, kkt_z, kkt_feas;
} ts_record;

TRISPLIT_API const char *ts_version(void);

/* Message describing the most recent failure on the calling thread. */
TRISPLIT_API const char *ts_last_error(void);

/* Frees strings returned through char** out-parameters. */
TRISPLIT_API void ts_string_free(char *s);

/* --- problems ----------------------------------------------------------- */

/* Built-in corpus. Names: "convex_sanity" (uses m), "tv_sparse_recovery"
 * (uses m and seed), "reduction_palm" (m, q), "reduction_yfree" (m, q as
 * the operator row count), "reduction_proxgrad" (q). Unused size arguments
 * may be zero. */
TRISPLIT_API ts_status ts_problem_builtin(const char *name, size_t m, size_t q,
                                          uint64_t seed, ts_problem **out);

/* Instantiates the [problem] table of a run config file. */
TRISPLIT_API ts_status ts_problem_from_config(const char *config_path,
                                              ts_problem **out);

TRISPLIT_API void ts_problem_free(ts_problem *problem);

TRISPLIT_API ts_status ts_problem_dims(const ts_problem *problem, size_t *m,
                                       size_t *q, size_t *p);

/* Spectral data of the operator: ||A||, lambda_min(AA^T), kappa(AA^T). */
TRISPLIT_API ts_status ts_problem_spectral(const ts_problem *problem,
                                           double *operator_norm,
                                           double *min_eig_aat, double *kappa);

TRISPLIT_API ts_status ts_problem_lipschitz(const ts_problem *problem,
                                            double *lipschitz);

/* --- tuning ------------------------------------------------------------- */

/* Picks admissible parameters; safety in (0,1) controls the margin. */
TRISPLIT_API ts_status ts_tune(const ts_problem *problem, double safety,
                               ts_params *out);

/* Derived constants plus the admissibility report for given parameters,
 * as a JSON document. */
TRISPLIT_API ts_status ts_constants_json(const ts_problem *problem,
                                         const ts_params *params,
                                         char **json_out);

/* --- solving ------------------------------------------------------------ */

TRISPLIT_API ts_status ts_solve(const ts_problem *problem,
                                const ts_params *params,
                                const ts_stopping *stopping, int strict_mode,
                                ts_run **out);

TRISPLIT_API void ts_run_free(ts_run *run);

/* TS_OK (converged), TS_MAX_ITERATIONS, TS_ASSUMPTION_VIOLATION or
 * TS_DIVERGENCE. */
TRISPLIT_API ts_status ts_run_outcome(const ts_run *run);

TRISPLIT_API size_t ts_run_length(const ts_run *run);

TRISPLIT_API ts_status ts_run_record(const ts_run *run, size_t index,
                                     ts_record *out);

TRISPLIT_API ts_status ts_run_write_trace_csv(const ts_run *run,
                                              const char *path);

TRISPLIT_API ts_status ts_run_write_trace_json(const ts_run *run,
                                               const char *path);

/* Full diagnostics report (descent/subgradient checks, rate estimate,
 * final KKT residuals) as a JSON document. */
TRISPLIT_API ts_status ts_run_diagnostics_json(const ts_run *run,
                                               char **json_out);

/* --- config-driven commands (what the CLI calls) ------------------------ */

typedef struct ts_run_options {
  const char *output_dir;  /* NULL: config value, then $TRISPLIT_OUT */
  int strict_override;     /* -1 keep config, 0 permissive, 1 strict */
  int has_seed_override;
  uint64_t seed_override;
} ts_run_options;

/* Executes a run config: solves, writes trace/constants/diagnostics files,
 * prints a summary to stdout. Returns the CLI exit semantics. */
TRISPLIT_API ts_status ts_command_run(const char *config_path,
                                      const ts_run_options *options);

/* Prints parameters, constants and the admissibility report as JSON. */
TRISPLIT_API ts_status ts_command_tune(const char *config_path,
                                       char **json_out);

/* Re-runs the trace-level checks on stored outputs. TS_OK iff the descent
 * and subgradient bounds hold. */
TRISPLIT_API ts_status ts_command_verify(const char *trace_path,
                                         const char *constants_path,
                                         char **report_json_out);

#ifdef __cplusplus
}
#endif

#endif /* TRISPLIT_H */
