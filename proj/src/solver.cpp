#include "solver.hpp"

#include <cmath>

#include "errors.hpp"

namespace trisplit {

namespace {

void require_finite(const Vec &v, const char *block) {
  if (!all_finite(v))
    throw NumericalDivergenceError(std::string(block) + " produced a non-finite value");
}

double state_norm(const SolverState &s) {
  return std::sqrt(norm_sq(s.x) + norm_sq(s.y) + norm_sq(s.z) + norm_sq(s.u));
}

} // namespace

SolverState make_initial_state(const ProblemInstance &problem, std::optional<Vec> x0,
                               std::optional<Vec> y0) {
  SolverState s;
  s.x = x0 ? std::move(*x0) : Vec(problem.m(), 0.0);
  s.y = y0 ? std::move(*y0) : Vec(problem.q(), 0.0);
  if (s.x.size() != problem.m() || s.y.size() != problem.q())
    throw DimensionError("initial state does not match the problem dimensions");
  s.z = problem.a.apply(s.x);
  s.u = Vec(problem.p(), 0.0);
  s.x_prev = s.x;
  s.y_prev = s.y;
  s.z_prev = s.z;
  s.u_prev = s.u;
  s.iteration = 0;
  return s;
}

SolverState step(const SolverState &state, const ProblemInstance &problem,
                 const SolverParams &params) {
  const double mu = params.mu;
  const double beta = params.beta;
  const double tau = params.tau;
  const double sigma = params.sigma;
  if (!(mu > 0.0) || !(beta > 0.0) || !(tau > 0.0) || !(sigma > 0.0))
    throw InvalidArgumentError("step: parameters must be positive");

  SolverState next;

  // (1) y-block
  Vec y_arg = problem.h.grad_y(state.x, state.y);
  for (std::size_t i = 0; i < y_arg.size(); ++i) y_arg[i] = state.y[i] - y_arg[i] / mu;
  next.y = problem.g.prox(1.0 / mu, y_arg);
  require_finite(next.y, "y-update");

  // (2) z-block (independent of (1))
  const Vec ax = problem.a.apply(state.x);
  Vec z_arg(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) z_arg[i] = ax[i] + state.u[i] / beta;
  next.z = problem.f.prox(1.0 / beta, z_arg);
  require_finite(next.z, "z-update");

  // (3) x-block
  const Vec gx = problem.h.grad_x(state.x, next.y);
  Vec resid(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) resid[i] = ax[i] - next.z[i];
  const Vec at_u = problem.a.adjoint_apply(state.u);
  const Vec at_r = problem.a.adjoint_apply(resid);
  next.x.resize(state.x.size());
  for (std::size_t i = 0; i < next.x.size(); ++i)
    next.x[i] = state.x[i] - (gx[i] + at_u[i] + beta * at_r[i]) / tau;
  require_finite(next.x, "x-update");

  // (4) dual block
  const Vec ax_new = problem.a.apply(next.x);
  next.u.resize(state.u.size());
  for (std::size_t i = 0; i < next.u.size(); ++i)
    next.u[i] = state.u[i] + sigma * beta * (ax_new[i] - next.z[i]);
  require_finite(next.u, "u-update");

  next.x_prev = state.x;
  next.y_prev = state.y;
  next.z_prev = state.z;
  next.u_prev = state.u;
  next.iteration = state.iteration + 1;
  return next;
}

double augmented_lagrangian(const SolverState &state, const ProblemInstance &problem,
                            const SolverParams &params) {
  const Vec ax = problem.a.apply(state.x);
  const Vec r = sub(ax, state.z);
  return problem.f.evaluate(state.z) + problem.g.evaluate(state.y) +
         problem.h.value(state.x, state.y) + dot(state.u, r) +
         0.5 * params.beta * norm_sq(r);
}

double evaluate_psi(const SolverState &state, const ProblemInstance &problem,
                    const SolverParams &params, const DerivedConstants &constants) {
  if (state.iteration < 1)
    throw InvalidArgumentError("evaluate_psi: needs a state with meaningful previous fields");
  const Vec du = sub(state.u, state.u_prev);
  const Vec dx = sub(state.x, state.x_prev);
  Vec reg = problem.a.adjoint_apply(du);
  const Vec bdx = problem.a.coupling_apply(params.tau, params.beta, dx);
  axpy(reg, params.sigma, bdx);
  return augmented_lagrangian(state, problem, params) + constants.c0 * norm_sq(reg) +
         constants.c1 * norm_sq(dx);
}

SubgradientEstimate subgradient_residual(const SolverState &state,
                                         const ProblemInstance &problem,
                                         const SolverParams &params,
                                         const DerivedConstants &constants) {
  if (state.iteration < 1)
    throw InvalidArgumentError("subgradient_residual: needs a state with previous fields");

  const double beta = params.beta;
  const double sigma = params.sigma;
  const Vec du = sub(state.u, state.u_prev);
  const Vec dxv = sub(state.x, state.x_prev);

  // Shared inner term A^T(u - u') + sigma B (x - x'); B is symmetric.
  Vec common = problem.a.adjoint_apply(du);
  axpy(common, sigma, problem.a.coupling_apply(params.tau, beta, dxv));
  const Vec b_common = problem.a.coupling_apply(params.tau, beta, common);
  const Vec a_common = problem.a.apply(common);

  const Vec ax = problem.a.apply(state.x);
  const Vec r = sub(ax, state.z);

  SubgradientEstimate out;

  out.d_x = problem.h.grad_x(state.x, state.y);
  {
    const Vec at_u = problem.a.adjoint_apply(state.u);
    const Vec at_r = problem.a.adjoint_apply(r);
    for (std::size_t i = 0; i < out.d_x.size(); ++i)
      out.d_x[i] += at_u[i] + beta * at_r[i] + 2.0 * constants.c1 * dxv[i] +
                    2.0 * sigma * constants.c0 * b_common[i];
  }

  out.d_y = problem.h.grad_y(state.x, state.y);
  {
    const Vec gy_prev = problem.h.grad_y(state.x_prev, state.y_prev);
    for (std::size_t i = 0; i < out.d_y.size(); ++i)
      out.d_y[i] += -gy_prev[i] + params.mu * (state.y_prev[i] - state.y[i]);
  }

  out.d_z.resize(state.z.size());
  {
    const Vec a_dx = problem.a.apply(dxv);
    for (std::size_t i = 0; i < out.d_z.size(); ++i)
      out.d_z[i] = -du[i] - beta * a_dx[i];
  }

  out.d_u.resize(state.u.size());
  for (std::size_t i = 0; i < out.d_u.size(); ++i)
    out.d_u[i] = r[i] + 2.0 * constants.c0 * a_common[i];

  out.d_x_prev.resize(state.x.size());
  for (std::size_t i = 0; i < out.d_x_prev.size(); ++i)
    out.d_x_prev[i] = -2.0 * sigma * constants.c0 * b_common[i] - 2.0 * constants.c1 * dxv[i];

  out.d_u_prev.resize(state.u.size());
  for (std::size_t i = 0; i < out.d_u_prev.size(); ++i)
    out.d_u_prev[i] = -2.0 * constants.c0 * a_common[i];

  out.norm = std::sqrt(norm_sq(out.d_x) + norm_sq(out.d_y) + norm_sq(out.d_z) +
                       norm_sq(out.d_u) + norm_sq(out.d_x_prev) + norm_sq(out.d_u_prev));
  return out;
}

KktResidual kkt_residual(const SolverState &state, const ProblemInstance &problem) {
  KktResidual r;

  Vec g = problem.h.grad_x(state.x, state.y);
  const Vec at_u = problem.a.adjoint_apply(state.u);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += at_u[i];
  r.grad_x = norm(g);

  const Vec gy = problem.h.grad_y(state.x, state.y);
  Vec y_arg(state.y.size());
  for (std::size_t i = 0; i < y_arg.size(); ++i) y_arg[i] = state.y[i] - gy[i];
  r.y = dist(state.y, problem.g.prox(1.0, y_arg));

  Vec z_arg(state.z.size());
  for (std::size_t i = 0; i < z_arg.size(); ++i) z_arg[i] = state.z[i] + state.u[i];
  r.z = dist(state.z, problem.f.prox(1.0, z_arg));

  r.feasibility = dist(problem.a.apply(state.x), state.z);
  return r;
}

namespace {

IterationRecord make_record(const SolverState &state, const ProblemInstance &problem,
                            const SolverParams &params, const DerivedConstants &constants) {
  IterationRecord rec;
  rec.n = state.iteration;
  rec.psi = evaluate_psi(state, problem, params, constants);
  rec.lagrangian = augmented_lagrangian(state, problem, params);
  rec.objective = problem.f.evaluate(state.z) + problem.g.evaluate(state.y) +
                  problem.h.value(state.x, state.y);
  rec.feasibility = dist(problem.a.apply(state.x), state.z);
  rec.dx = dist(state.x, state.x_prev);
  rec.dy = dist(state.y, state.y_prev);
  rec.dz = dist(state.z, state.z_prev);
  rec.du = dist(state.u, state.u_prev);
  rec.subgrad_norm = subgradient_residual(state, problem, params, constants).norm;
  const KktResidual kkt = kkt_residual(state, problem);
  rec.kkt_grad_x = kkt.grad_x;
  rec.kkt_y = kkt.y;
  rec.kkt_z = kkt.z;
  rec.kkt_feas = kkt.feasibility;
  return rec;
}

} // namespace

IterationTrace run(const ProblemInstance &problem, const SolverParams &params,
                   const StoppingRule &stopping, const SolverState &initial,
                   const RunOptions &options) {
  if (stopping.max_iterations < 1)
    throw InvalidArgumentError("run: max_iterations must be at least 1");

  IterationTrace trace;
  trace.params = params;
  trace.constants = derive_constants(problem.a.spectral(), problem.h.lipschitz(), params);
  trace.constants.psi_lower_bound_hint = problem.psi_lower_hint();
  trace.initial_lagrangian = augmented_lagrangian(initial, problem, params);

  if (options.strict_mode) {
    const AdmissibilityReport report = validate(params, trace.constants, problem.a.spectral());
    if (!report.admissible()) {
      std::string why;
      if (!report.sigma_in_range) why += " sigma outside (0, 1];";
      if (!report.dual_step_compatible) why += " 2 tau < beta ||A||^2;";
      if (!report.c2_positive) why += " C2 <= 0;";
      if (!report.c3_positive) why += " C3 <= 0;";
      if (!report.c4_positive) why += " C4 <= 0;";
      throw AssumptionViolationError("strict mode refuses inadmissible parameters:" + why);
    }
  }

  const double guard =
      stopping.divergence_guard > 0.0 ? stopping.divergence_guard : 1e12;

  SolverState state = initial;
  trace.outcome = RunOutcome::MaxIterations;
  for (std::uint64_t it = 0; it < stopping.max_iterations; ++it) {
    try {
      state = step(state, problem, params);
    } catch (const NumericalDivergenceError &e) {
      trace.outcome = RunOutcome::Divergence;
      trace.message = e.what();
      break;
    }

    const IterationRecord rec = make_record(state, problem, params, trace.constants);
    trace.records.push_back(rec);
    if (options.keep_iterates) trace.iterates.push_back(state);

    if (options.strict_mode && trace.records.size() >= 2) {
      const IterationRecord &prev = trace.records[trace.records.size() - 2];
      const double lhs = rec.psi + trace.constants.c2 * rec.dx * rec.dx +
                         trace.constants.c3 * rec.dy * rec.dy +
                         trace.constants.c4 * rec.du * rec.du;
      if (lhs > prev.psi + 1e-9 * (1.0 + std::abs(prev.psi))) {
        trace.outcome = RunOutcome::AssumptionViolation;
        trace.message = "per-step descent check failed at iteration " +
                        std::to_string(rec.n);
        break;
      }
    }

    if (state_norm(state) > guard) {
      trace.outcome = RunOutcome::Divergence;
      trace.message = "state norm exceeded the divergence guard at iteration " +
                      std::to_string(rec.n);
      break;
    }

    if (stopping.step_tol > 0.0) {
      const double step_max = std::max(std::max(rec.dx, rec.dy), std::max(rec.dz, rec.du));
      const bool kkt_ok =
          !stopping.kkt_tol ||
          std::max(std::max(rec.kkt_grad_x, rec.kkt_y), std::max(rec.kkt_z, rec.kkt_feas)) <=
              *stopping.kkt_tol;
      if (step_max < stopping.step_tol && kkt_ok) {
        trace.outcome = RunOutcome::Converged;
        break;
      }
    }
  }

  trace.final_state = state;
  return trace;
}

} // namespace trisplit
