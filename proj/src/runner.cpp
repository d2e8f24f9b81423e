#include "runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "config.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "serialize.hpp"

namespace trisplit {

namespace fs = std::filesystem;

namespace {

std::string resolve_output_dir(const RunConfig &cfg, const RunOverrides &overrides) {
  if (overrides.output_dir) return *overrides.output_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char *env = std::getenv("TRISPLIT_OUT"); env && *env) return env;
  return ".";
}

int outcome_exit_code(RunOutcome outcome) {
  switch (outcome) {
  case RunOutcome::Converged: return 0;
  case RunOutcome::MaxIterations: return 2;
  case RunOutcome::AssumptionViolation: return 3;
  case RunOutcome::Divergence: return 4;
  }
  return 99;
}

std::string signal_to_csv(const Vec &signal) {
  std::string out;
  for (double v : signal) {
    out += format_g17(v);
    out.push_back('\n');
  }
  return out;
}

} // namespace

int command_run(const std::string &config_path, const RunOverrides &overrides) {
  RunConfig cfg = parse_run_config_file(config_path);
  if (overrides.strict_mode) cfg.strict_mode = *overrides.strict_mode;
  if (overrides.seed) cfg.problem.seed = *overrides.seed;

  const ProblemInstance problem = instantiate(cfg.problem);

  const SolverParams params =
      cfg.params ? *cfg.params
                 : select_parameters(problem.a.spectral(), problem.h.lipschitz(),
                                     cfg.tuning_safety.value_or(0.5));

  const fs::path out_dir(resolve_output_dir(cfg, overrides));
  fs::create_directories(out_dir);

  // Constants dumped alongside every run for reproducibility.
  DerivedConstants constants =
      derive_constants(problem.a.spectral(), problem.h.lipschitz(), params);
  constants.psi_lower_bound_hint = problem.psi_lower_hint();
  if (cfg.loja_constant && constants.min_c234() > 0.0)
    constants = constants.with_lojasiewicz(*cfg.loja_constant);
  {
    nlohmann::json j{{"problem",
                      nlohmann::json{{"name", problem.name},
                                     {"seed", problem.seed},
                                     {"m", problem.m()},
                                     {"q", problem.q()},
                                     {"p", problem.p()}}},
                     {"spectral",
                      nlohmann::json{{"operator_norm", problem.a.norm()},
                                     {"min_eig_aat", problem.a.min_eig_aat()},
                                     {"kappa", problem.a.kappa()}}},
                     {"lipschitz", problem.h.lipschitz()},
                     {"params", params_to_json(params)},
                     {"constants", constants_to_json(constants)},
                     {"admissibility",
                      admissibility_to_json(validate(params, constants, problem.a.spectral()))}};
    write_text_file((out_dir / "constants.json").string(), j.dump(2) + "\n");
  }

  if (!cfg.strict_mode &&
      !validate(params, constants, problem.a.spectral()).admissible())
    std::cerr << "warning: parameters violate the admissibility conditions; "
                 "the descent theory does not apply to this run\n";

  IterationTrace trace;
  RunOptions options;
  options.strict_mode = cfg.strict_mode;
  try {
    trace = run(problem, params, cfg.stopping, make_initial_state(problem), options);
  } catch (const AssumptionViolationError &e) {
    std::cerr << e.what() << "\n";
    return 3;
  }

  if (cfg.write_csv)
    write_text_file((out_dir / "trace.csv").string(), trace_to_csv(trace.records));
  if (cfg.write_json)
    write_text_file((out_dir / "trace.json").string(), trace_to_json(trace).dump(2) + "\n");
  if (problem.signal)
    write_text_file((out_dir / "signal.csv").string(), signal_to_csv(*problem.signal));

  if (trace.records.size() >= 2) {
    DiagnosticsOptions options_diag;
    options_diag.loja_constant = cfg.loja_constant;
    options_diag.psi_star = cfg.psi_star;
    const DiagnosticsReport report = diagnose(trace, options_diag);
    write_text_file((out_dir / "diagnostics.json").string(),
                    diagnostics_to_json(report).dump(2) + "\n");
    std::cout << summarize(report);
  }
  if (!trace.message.empty()) std::cout << trace.message << "\n";
  std::cout << "outcome: " << outcome_name(trace.outcome) << " after "
            << trace.records.size() << " iterations\n";
  return outcome_exit_code(trace.outcome);
}

std::string command_tune(const std::string &config_path) {
  const ConfigTable table = ConfigTable::parse_file(config_path);
  const ProblemDescriptor descriptor = parse_problem(table);
  const ProblemInstance problem = instantiate(descriptor);

  if (!problem.a.surjective())
    throw NotSurjectiveError("tune: the operator is rank deficient "
                             "(lambda_min(AA^T) vanishes relative to ||A||^2)");

  SolverParams params;
  if (table.has_section("params")) {
    params.mu = table.number("params.mu");
    params.beta = table.number("params.beta");
    params.tau = table.number("params.tau");
    params.sigma = table.number("params.sigma");
  } else {
    params = select_parameters(problem.a.spectral(), problem.h.lipschitz(),
                               table.number_or("tuning.safety", 0.5));
  }

  DerivedConstants constants =
      derive_constants(problem.a.spectral(), problem.h.lipschitz(), params);
  constants.psi_lower_bound_hint = problem.psi_lower_hint();

  nlohmann::json j{{"params", params_to_json(params)},
                   {"constants", constants_to_json(constants)},
                   {"admissibility",
                    admissibility_to_json(validate(params, constants, problem.a.spectral()))}};
  return j.dump(2) + "\n";
}

VerifyResult command_verify(const std::string &trace_path, const std::string &constants_path) {
  std::vector<IterationRecord> records;
  const std::string trace_text = read_text_file(trace_path);
  if (trace_path.size() >= 5 && trace_path.substr(trace_path.size() - 5) == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(trace_text);
      records = records_from_trace_json(j);
    } catch (const nlohmann::json::exception &e) {
      throw IoError(std::string("trace json: ") + e.what());
    }
  } else {
    records = trace_from_csv(trace_text);
  }

  DerivedConstants constants;
  try {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(constants_path));
    constants = constants_from_json(j.contains("constants") ? j.at("constants") : j);
  } catch (const nlohmann::json::exception &e) {
    throw IoError(std::string("constants json: ") + e.what());
  }

  const DiagnosticsReport report = diagnose_records(records, constants);

  VerifyResult out;
  out.report_json = diagnostics_to_json(report).dump(2) + "\n";
  out.exit_code = report.ok() ? 0 : 3;
  return out;
}

} // namespace trisplit
