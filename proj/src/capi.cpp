#include "trisplit.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "config.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "runner.hpp"
#include "serialize.hpp"

using namespace trisplit;

struct ts_problem {
  ProblemInstance instance;
};

struct ts_run {
  ProblemInstance problem;
  SolverParams params;
  IterationTrace trace;
};

namespace {

thread_local std::string g_last_error;

ts_status status_of(const Error &e) {
  switch (e.code()) {
  case ErrorCode::Config: return TS_ERR_CONFIG;
  case ErrorCode::Dimension: return TS_ERR_DIMENSION;
  case ErrorCode::NotSurjective: return TS_ERR_NOT_SURJECTIVE;
  case ErrorCode::InvalidArgument: return TS_ERR_INVALID_ARGUMENT;
  case ErrorCode::EmptyInterval: return TS_ERR_EMPTY_INTERVAL;
  case ErrorCode::NumericalDivergence: return TS_DIVERGENCE;
  case ErrorCode::AssumptionViolation: return TS_ASSUMPTION_VIOLATION;
  case ErrorCode::TooShort: return TS_ERR_TOO_SHORT;
  case ErrorCode::NotConverged: return TS_ERR_NOT_CONVERGED;
  case ErrorCode::GridTooLarge: return TS_ERR_GRID_TOO_LARGE;
  case ErrorCode::Io: return TS_ERR_IO;
  case ErrorCode::Internal: return TS_ERR_INTERNAL;
  }
  return TS_ERR_INTERNAL;
}

template <typename Fn> ts_status guarded(Fn &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception &e) {
    g_last_error = e.what();
    return TS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TS_ERR_INTERNAL;
  }
}

/// CLI exit semantics: config/io/schema problems become 1, admissibility and
/// rank problems become 3.
ts_status to_exit_semantics(ts_status s) {
  switch (s) {
  case TS_OK:
  case TS_ERR_CONFIG:
  case TS_MAX_ITERATIONS:
  case TS_ASSUMPTION_VIOLATION:
  case TS_DIVERGENCE:
    return s;
  case TS_ERR_NOT_SURJECTIVE:
    return TS_ASSUMPTION_VIOLATION;
  case TS_ERR_IO:
  case TS_ERR_TOO_SHORT:
  case TS_ERR_DIMENSION:
  case TS_ERR_INVALID_ARGUMENT:
    return TS_ERR_CONFIG;
  default:
    return TS_ERR_INTERNAL;
  }
}

char *copy_string(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ts_status require(bool cond, const char *what) {
  if (cond) return TS_OK;
  g_last_error = what;
  return TS_ERR_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char *ts_version(void) { return "0.1.0"; }

const char *ts_last_error(void) { return g_last_error.c_str(); }

void ts_string_free(char *s) { std::free(s); }

ts_status ts_problem_builtin(const char *name, size_t m, size_t q, uint64_t seed,
                             ts_problem **out) {
  if (ts_status s = require(name && out, "ts_problem_builtin: null argument")) return s;
  return guarded([&]() -> ts_status {
    ProblemDescriptor d;
    d.name = name;
    d.m = m;
    d.q = q;
    d.p = q; // the y-free builtin reads its row count from q
    d.seed = seed;
    auto handle = std::make_unique<ts_problem>(ts_problem{instantiate(d)});
    *out = handle.release();
    return TS_OK;
  });
}

ts_status ts_problem_from_config(const char *config_path, ts_problem **out) {
  if (ts_status s = require(config_path && out, "ts_problem_from_config: null argument"))
    return s;
  return guarded([&]() -> ts_status {
    const ConfigTable table = ConfigTable::parse_file(config_path);
    auto handle =
        std::make_unique<ts_problem>(ts_problem{instantiate(parse_problem(table))});
    *out = handle.release();
    return TS_OK;
  });
}

void ts_problem_free(ts_problem *problem) { delete problem; }

ts_status ts_problem_dims(const ts_problem *problem, size_t *m, size_t *q, size_t *p) {
  if (ts_status s = require(problem != nullptr, "ts_problem_dims: null problem")) return s;
  if (m) *m = problem->instance.m();
  if (q) *q = problem->instance.q();
  if (p) *p = problem->instance.p();
  return TS_OK;
}

ts_status ts_problem_spectral(const ts_problem *problem, double *operator_norm,
                              double *min_eig_aat, double *kappa) {
  if (ts_status s = require(problem != nullptr, "ts_problem_spectral: null problem"))
    return s;
  const SpectralQuantities &spec = problem->instance.a.spectral();
  if (operator_norm) *operator_norm = spec.operator_norm;
  if (min_eig_aat) *min_eig_aat = spec.min_eig_aat;
  if (kappa) *kappa = spec.kappa;
  return TS_OK;
}

ts_status ts_problem_lipschitz(const ts_problem *problem, double *lipschitz) {
  if (ts_status s = require(problem && lipschitz, "ts_problem_lipschitz: null argument"))
    return s;
  *lipschitz = problem->instance.h.lipschitz();
  return TS_OK;
}

ts_status ts_tune(const ts_problem *problem, double safety, ts_params *out) {
  if (ts_status s = require(problem && out, "ts_tune: null argument")) return s;
  return guarded([&]() -> ts_status {
    const SolverParams p = select_parameters(problem->instance.a.spectral(),
                                             problem->instance.h.lipschitz(), safety);
    *out = {p.mu, p.beta, p.tau, p.sigma};
    return TS_OK;
  });
}

ts_status ts_constants_json(const ts_problem *problem, const ts_params *params,
                            char **json_out) {
  if (ts_status s = require(problem && params && json_out, "ts_constants_json: null argument"))
    return s;
  return guarded([&]() -> ts_status {
    const SolverParams p{params->mu, params->beta, params->tau, params->sigma};
    DerivedConstants constants =
        derive_constants(problem->instance.a.spectral(), problem->instance.h.lipschitz(), p);
    constants.psi_lower_bound_hint = problem->instance.psi_lower_hint();
    nlohmann::json j{
        {"params", params_to_json(p)},
        {"constants", constants_to_json(constants)},
        {"admissibility",
         admissibility_to_json(validate(p, constants, problem->instance.a.spectral()))}};
    *json_out = copy_string(j.dump(2) + "\n");
    return TS_OK;
  });
}

ts_status ts_solve(const ts_problem *problem, const ts_params *params,
                   const ts_stopping *stopping, int strict_mode, ts_run **out) {
  if (ts_status s = require(problem && params && stopping && out, "ts_solve: null argument"))
    return s;
  return guarded([&]() -> ts_status {
    const SolverParams p{params->mu, params->beta, params->tau, params->sigma};
    StoppingRule rule;
    rule.max_iterations = stopping->max_iterations;
    rule.step_tol = stopping->step_tol;
    if (stopping->kkt_tol > 0.0) rule.kkt_tol = stopping->kkt_tol;
    rule.divergence_guard = stopping->divergence_guard;
    RunOptions options;
    options.strict_mode = strict_mode != 0;

    auto handle = std::make_unique<ts_run>();
    handle->problem = problem->instance;
    handle->params = p;
    handle->trace = run(problem->instance, p, rule, make_initial_state(problem->instance),
                        options);
    *out = handle.release();
    return TS_OK;
  });
}

void ts_run_free(ts_run *run) { delete run; }

ts_status ts_run_outcome(const ts_run *run) {
  if (!run) return TS_ERR_INVALID_ARGUMENT;
  switch (run->trace.outcome) {
  case RunOutcome::Converged: return TS_OK;
  case RunOutcome::MaxIterations: return TS_MAX_ITERATIONS;
  case RunOutcome::AssumptionViolation: return TS_ASSUMPTION_VIOLATION;
  case RunOutcome::Divergence: return TS_DIVERGENCE;
  }
  return TS_ERR_INTERNAL;
}

size_t ts_run_length(const ts_run *run) { return run ? run->trace.records.size() : 0; }

ts_status ts_run_record(const ts_run *run, size_t index, ts_record *out) {
  if (ts_status s = require(run && out, "ts_run_record: null argument")) return s;
  if (index >= run->trace.records.size()) {
    g_last_error = "ts_run_record: index out of range";
    return TS_ERR_INVALID_ARGUMENT;
  }
  const IterationRecord &r = run->trace.records[index];
  *out = {r.n,  r.psi, r.lagrangian,   r.objective,  r.feasibility, r.dx,    r.dy,
          r.dz, r.du,  r.subgrad_norm, r.kkt_grad_x, r.kkt_y,       r.kkt_z, r.kkt_feas};
  return TS_OK;
}

ts_status ts_run_write_trace_csv(const ts_run *run, const char *path) {
  if (ts_status s = require(run && path, "ts_run_write_trace_csv: null argument")) return s;
  return guarded([&]() -> ts_status {
    write_text_file(path, trace_to_csv(run->trace.records));
    return TS_OK;
  });
}

ts_status ts_run_write_trace_json(const ts_run *run, const char *path) {
  if (ts_status s = require(run && path, "ts_run_write_trace_json: null argument")) return s;
  return guarded([&]() -> ts_status {
    write_text_file(path, trace_to_json(run->trace).dump(2) + "\n");
    return TS_OK;
  });
}

ts_status ts_run_diagnostics_json(const ts_run *run, char **json_out) {
  if (ts_status s = require(run && json_out, "ts_run_diagnostics_json: null argument"))
    return s;
  return guarded([&]() -> ts_status {
    const DiagnosticsReport report = diagnose(run->trace);
    *json_out = copy_string(diagnostics_to_json(report).dump(2) + "\n");
    return TS_OK;
  });
}

ts_status ts_command_run(const char *config_path, const ts_run_options *options) {
  if (ts_status s = require(config_path != nullptr, "ts_command_run: null config path"))
    return s;
  const ts_status raw = guarded([&]() -> ts_status {
    RunOverrides overrides;
    if (options) {
      if (options->output_dir) overrides.output_dir = std::string(options->output_dir);
      if (options->strict_override >= 0) overrides.strict_mode = options->strict_override != 0;
      if (options->has_seed_override) overrides.seed = options->seed_override;
    }
    return static_cast<ts_status>(command_run(config_path, overrides));
  });
  return to_exit_semantics(raw);
}

ts_status ts_command_tune(const char *config_path, char **json_out) {
  if (ts_status s = require(config_path && json_out, "ts_command_tune: null argument"))
    return s;
  const ts_status raw = guarded([&]() -> ts_status {
    *json_out = copy_string(command_tune(config_path));
    return TS_OK;
  });
  return to_exit_semantics(raw);
}

ts_status ts_command_verify(const char *trace_path, const char *constants_path,
                            char **report_json_out) {
  if (ts_status s =
          require(trace_path && constants_path, "ts_command_verify: null argument"))
    return s;
  const ts_status raw = guarded([&]() -> ts_status {
    const VerifyResult result = command_verify(trace_path, constants_path);
    if (report_json_out) *report_json_out = copy_string(result.report_json);
    return static_cast<ts_status>(result.exit_code);
  });
  return to_exit_semantics(raw);
}

} // extern "C"
