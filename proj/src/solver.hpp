#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bench.hpp"
#include "tuning.hpp"
#include "vec.hpp"

namespace trisplit {

/// Iterate tuple plus the previous x and u the regularized function needs.
/// The previous y and z are carried as well: the trace needs their step norms
/// and the subgradient element needs grad_y H at the previous pair.
struct SolverState {
  Vec x, y, z, u;
  Vec x_prev, y_prev, z_prev, u_prev;
  std::uint64_t iteration = 0;
};

/// Default start: z0 = A x0 (first feasibility residual is zero) and u0 = 0.
SolverState make_initial_state(const ProblemInstance &problem,
                               std::optional<Vec> x0 = std::nullopt,
                               std::optional<Vec> y0 = std::nullopt);

struct IterationRecord {
  std::uint64_t n = 0;
  double psi = 0.0;
  double lagrangian = 0.0;
  double objective = 0.0;
  double feasibility = 0.0; // ||Ax - z||
  double dx = 0.0, dy = 0.0, dz = 0.0, du = 0.0;
  double subgrad_norm = 0.0;
  double kkt_grad_x = 0.0, kkt_y = 0.0, kkt_z = 0.0, kkt_feas = 0.0;
};

struct StoppingRule {
  std::uint64_t max_iterations = 1000;
  double step_tol = 1e-9;              // on max{dx, dy, dz, du}; <= 0 disables
  std::optional<double> kkt_tol;       // additionally require max KKT residual below
  double divergence_guard = 1e12;      // abort when the state norm exceeds this
};

enum class RunOutcome { Converged, MaxIterations, AssumptionViolation, Divergence };

struct IterationTrace {
  std::vector<IterationRecord> records; // records[i] is iteration i+1
  RunOutcome outcome = RunOutcome::MaxIterations;
  std::string message;
  double initial_lagrangian = 0.0; // the n = 0 row carries the Lagrangian only
  SolverState final_state;
  DerivedConstants constants;
  SolverParams params;
  std::vector<SolverState> iterates; // parallel to records when kept
};

/// One pass of the four-step scheme:
///   y+ = prox_{G/mu}(y - grad_y H(x, y)/mu)
///   z+ = prox_{F/beta}(A x + u/beta)
///   x+ = x - (grad_x H(x, y+) + A^T u + beta A^T (A x - z+)) / tau
///   u+ = u + sigma beta (A x+ - z+)
/// The first two steps read only pre-step state and are independent.
/// Throws NumericalDivergenceError naming the block that produced a
/// non-finite value.
SolverState step(const SolverState &state, const ProblemInstance &problem,
                 const SolverParams &params);

/// F(z) + G(y) + H(x,y) + <u, Ax - z> + (beta/2) ||Ax - z||^2
double augmented_lagrangian(const SolverState &state, const ProblemInstance &problem,
                            const SolverParams &params);

/// Augmented Lagrangian plus the regularization terms
/// c0 ||A^T(u - u') + sigma B (x - x')||^2 + c1 ||x - x'||^2.
/// Requires iteration >= 1 (needs meaningful previous fields).
double evaluate_psi(const SolverState &state, const ProblemInstance &problem,
                    const SolverParams &params, const DerivedConstants &constants);

/// The explicit subgradient element of the regularized function at the
/// current tuple, component by component, plus its product-space norm.
struct SubgradientEstimate {
  Vec d_x, d_y, d_z, d_u, d_x_prev, d_u_prev;
  double norm = 0.0;
};

SubgradientEstimate subgradient_residual(const SolverState &state,
                                         const ProblemInstance &problem,
                                         const SolverParams &params,
                                         const DerivedConstants &constants);

/// Stationarity certificates with unit prox probe steps:
///   grad_x: ||grad_x H(x,y) + A^T u||
///   y:      ||y - prox_{G}(y - grad_y H(x,y))||
///   z:      ||z - prox_{F}(z + u)||
///   feasibility: ||Ax - z||
struct KktResidual {
  double grad_x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double feasibility = 0.0;

  double max() const { return std::max(std::max(grad_x, y), std::max(z, feasibility)); }
};

KktResidual kkt_residual(const SolverState &state, const ProblemInstance &problem);

struct RunOptions {
  bool strict_mode = true;   // refuse inadmissible parameters, check descent per step
  bool keep_iterates = true; // retain state snapshots for post-hoc iterate checks
};

/// Runs the iteration until the stopping rule fires. Deterministic for fixed
/// inputs. In strict mode, inadmissible parameters throw
/// AssumptionViolationError before the first step; a failed per-step descent
/// check or a divergence ends the run with the corresponding outcome and the
/// trace collected so far.
IterationTrace run(const ProblemInstance &problem, const SolverParams &params,
                   const StoppingRule &stopping, const SolverState &initial,
                   const RunOptions &options = {});

} // namespace trisplit
