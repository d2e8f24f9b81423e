#pragma once

#include <optional>
#include <span>
#include <string>

#include "solver.hpp"

namespace trisplit {

struct DescentCheck {
  bool ok = false;
  double worst_violation = 0.0; // max over n of lhs(n+1) - psi(n)
};

/// Checks psi_{n+1} + c2 dx^2 + c3 dy^2 + c4 du^2 <= psi_n on consecutive
/// records, with relative tolerance 1e-9 * (1 + max |psi|).
DescentCheck check_descent(std::span<const IterationRecord> records,
                           const DerivedConstants &constants);

struct SubgradientCheck {
  bool ok = false;
  double worst_slack = 0.0; // max over n of norm - (c5 dx + c6 dy + c7 du)
};

/// Checks subgrad_norm <= c5 dx + c6 dy + c7 du + 1e-9 on every record.
SubgradientCheck check_subgradient_bound(std::span<const IterationRecord> records,
                                         const DerivedConstants &constants);

enum class RateRegime { FiniteTime, Linear, Sublinear, Undetermined };

struct RateEstimate {
  RateRegime regime = RateRegime::Undetermined;
  std::optional<double> theta_hat; // Lojasiewicz exponent, in [0, 1)
  std::optional<double> q_hat;     // geometric ratio for the linear regime
  double fit_quality = 0.0;        // R^2 of the selected regression
  std::size_t window_begin = 0;    // half-open index range of fitted gaps
  std::size_t window_end = 0;
};

/// Classifies the decay of the gap sequence gaps[i] ~ psi_{i+1} - psi_*.
/// FiniteTime on exact trailing zeros; otherwise fits log gaps against n
/// (geometric) and against log n (polynomial) over the tail window (first 10%
/// dropped as warm-up) and picks the regime whose fit is better by at least
/// 0.01. Throws TooShortError with fewer than 20 usable points.
RateEstimate estimate_rate(std::span<const double> gaps);

struct RecurrenceCheck {
  bool ok = false;
  double worst_slack = 0.0;
  double empirical_c10 = 0.0; // largest c for which the recurrence holds
};

/// Checks gaps[n-1] - gaps[n] >= c10 * gaps[n]^(2 theta) - 1e-9 past the
/// warm-up window.
RecurrenceCheck check_recurrence(std::span<const double> gaps, double theta, double c10);

struct IterateRateReport {
  bool ok = false;
  double worst_slack_xyu = 0.0; // against the c11 bound
  double worst_slack_z = 0.0;   // against the c12 bound
  double theta_used = 0.0;
  double c_l_used = 0.0;
};

/// Verifies the iterate bounds ||x_n - x_N|| <= c11 max{sqrt(E_n), phi(E_n)}
/// (same for y, u; c12 for z) on the tail window, the final iterate standing
/// in for the limit. Needs kept iterates and a converged run; the Lojasiewicz
/// constant is taken from `c_l` or estimated from the trace.
IterateRateReport iterate_rate_check(const IterationTrace &trace, const RateEstimate &rate,
                                     const DerivedConstants &constants,
                                     std::optional<double> c_l = std::nullopt);

struct DiagnosticsOptions {
  std::optional<double> psi_star;      // default: mean of the last 5% of psi values
  std::optional<double> loja_constant; // default: estimated from the trace
  bool run_iterate_check = true;
};

struct DiagnosticsReport {
  DescentCheck descent;
  SubgradientCheck subgrad;
  std::optional<bool> psi_lower_ok; // set when the instance declares its infima
  RateEstimate rate;
  std::optional<double> recurrence_empirical_c10;
  std::optional<double> recurrence_reference_c10; // c8 / (3 (C_L c9)^2)
  std::optional<bool> recurrence_ok;
  std::optional<IterateRateReport> iterate_rate;
  double psi_star_used = 0.0;
  double estimated_loja_constant = 0.0; // 0 when not estimable
  double max_step_norm = 0.0;           // sup over the trace of max{dx,dy,dz,du}
  KktResidual final_kkt;
  std::optional<SolverState> limit_point; // final state snapshot; unset on the
                                          // records-only (verify) path
  RunOutcome outcome = RunOutcome::MaxIterations;
  bool bounded = true; // all recorded states stayed finite

  bool ok() const { return descent.ok && subgrad.ok; }
};

/// Full post-hoc verification of a run. Pure function of the trace. Throws
/// TooShortError when the trace has fewer than 2 records.
DiagnosticsReport diagnose(const IterationTrace &trace, const DiagnosticsOptions &options = {});

/// Same checks driven from stored columns only (the verify command path):
/// no oracle access, so the final KKT residuals are taken from the last
/// record and the iterate check is skipped.
DiagnosticsReport diagnose_records(std::span<const IterationRecord> records,
                                   const DerivedConstants &constants,
                                   const DiagnosticsOptions &options = {});

/// Human-readable summary, one line per check.
std::string summarize(const DiagnosticsReport &report);

} // namespace trisplit
