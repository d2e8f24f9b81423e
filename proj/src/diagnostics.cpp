#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace trisplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit f;
  if (sxx <= 0.0 || syy <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxy * sxy) / (sxx * syy);
  return f;
}

} // namespace

DescentCheck check_descent(std::span<const IterationRecord> records,
                           const DerivedConstants &constants) {
  if (records.size() < 2)
    throw TooShortError("check_descent: need at least 2 records");

  DescentCheck out;
  out.worst_violation = -kInf;
  double psi_scale = 0.0;
  for (const auto &r : records) psi_scale = std::max(psi_scale, std::abs(r.psi));

  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const IterationRecord &cur = records[i];
    const IterationRecord &nxt = records[i + 1];
    const double lhs = nxt.psi + constants.c2 * nxt.dx * nxt.dx +
                       constants.c3 * nxt.dy * nxt.dy + constants.c4 * nxt.du * nxt.du;
    out.worst_violation = std::max(out.worst_violation, lhs - cur.psi);
  }
  out.ok = out.worst_violation <= 1e-9 * (1.0 + psi_scale);
  return out;
}

SubgradientCheck check_subgradient_bound(std::span<const IterationRecord> records,
                                         const DerivedConstants &constants) {
  if (records.empty())
    throw TooShortError("check_subgradient_bound: empty trace");

  SubgradientCheck out;
  out.worst_slack = -kInf;
  for (const auto &r : records) {
    const double bound = constants.c5 * r.dx + constants.c6 * r.dy + constants.c7 * r.du;
    out.worst_slack = std::max(out.worst_slack, r.subgrad_norm - bound);
  }
  out.ok = out.worst_slack <= 1e-9;
  return out;
}

RateEstimate estimate_rate(std::span<const double> gaps) {
  if (gaps.size() < 20) throw TooShortError("estimate_rate: need at least 20 gap values");

  RateEstimate est;

  // Finite time: an exact zero that persists to the end of the sequence.
  std::size_t first_zero = gaps.size();
  for (std::size_t i = gaps.size(); i-- > 0;) {
    if (gaps[i] == 0.0)
      first_zero = i;
    else
      break;
  }
  if (first_zero < gaps.size()) {
    est.regime = RateRegime::FiniteTime;
    est.theta_hat = 0.0;
    est.fit_quality = 1.0;
    est.window_begin = first_zero;
    est.window_end = gaps.size();
    return est;
  }

  const std::size_t warm = gaps.size() / 10;
  std::vector<double> ns, logs;
  std::size_t end = warm;
  for (std::size_t i = warm; i < gaps.size(); ++i) {
    if (!(gaps[i] > 0.0)) break; // the noise floor around the psi_* estimate
    ns.push_back(static_cast<double>(i + 1));
    logs.push_back(std::log(gaps[i]));
    end = i + 1;
  }
  if (ns.size() < 20) throw TooShortError("estimate_rate: fewer than 20 usable gap values");

  est.window_begin = warm;
  est.window_end = end;

  const LineFit lin = fit_line(ns, logs);
  std::vector<double> log_ns(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) log_ns[i] = std::log(ns[i]);
  const LineFit sub = fit_line(log_ns, logs);

  const double q = std::exp(lin.slope);
  double theta = kInf;
  // A slope in (-1, 0) yields theta >= 1; cap inside the admissible range.
  if (sub.slope < 0.0)
    theta = std::min((sub.slope - 1.0) / (2.0 * sub.slope), 1.0 - 1e-12);

  const bool linear_valid = q > 0.0 && q < 1.0;
  const bool sublinear_valid = theta > 0.5 && theta < 1.0;

  if (linear_valid && lin.r2 >= sub.r2 + 0.01) {
    est.regime = RateRegime::Linear;
    est.q_hat = q;
    est.theta_hat = 0.5; // consistent with theta <= 1/2; not identifiable below that
    est.fit_quality = lin.r2;
  } else if (sublinear_valid && sub.r2 >= lin.r2 + 0.01) {
    est.regime = RateRegime::Sublinear;
    est.theta_hat = theta;
    est.fit_quality = sub.r2;
  } else {
    est.regime = RateRegime::Undetermined;
    est.fit_quality = std::max(lin.r2, sub.r2);
  }
  return est;
}

RecurrenceCheck check_recurrence(std::span<const double> gaps, double theta, double c10) {
  if (!(theta >= 0.0) || !(theta < 1.0))
    throw InvalidArgumentError("check_recurrence: theta must lie in [0, 1)");
  if (!(c10 > 0.0)) throw InvalidArgumentError("check_recurrence: c10 must be positive");
  if (gaps.size() < 2) throw TooShortError("check_recurrence: need at least 2 gap values");

  RecurrenceCheck out;
  out.worst_slack = -kInf;
  out.empirical_c10 = kInf;
  const std::size_t warm = gaps.size() / 10;
  bool any = false;
  for (std::size_t i = std::max<std::size_t>(warm, 1); i < gaps.size(); ++i) {
    if (!(gaps[i] > 0.0)) continue; // vacuous at exact zeros
    any = true;
    const double decrease = gaps[i - 1] - gaps[i];
    const double power = std::pow(gaps[i], 2.0 * theta);
    out.worst_slack = std::max(out.worst_slack, c10 * power - decrease);
    out.empirical_c10 = std::min(out.empirical_c10, decrease / power);
  }
  if (!any) {
    // All gaps at zero: the recurrence holds vacuously.
    out.ok = true;
    out.worst_slack = 0.0;
    return out;
  }
  out.empirical_c10 = std::max(out.empirical_c10, 0.0);
  out.ok = out.worst_slack <= 1e-9;
  return out;
}

namespace {

double estimate_loja_constant(std::span<const IterationRecord> records,
                              std::span<const double> gaps, double theta,
                              std::size_t begin, std::size_t end) {
  double c_l = 0.0;
  for (std::size_t i = begin; i < end && i < records.size(); ++i) {
    if (!(gaps[i] > 0.0) || !(records[i].subgrad_norm > 0.0)) continue;
    c_l = std::max(c_l, std::pow(gaps[i], theta) / records[i].subgrad_norm);
  }
  return c_l;
}

} // namespace

IterateRateReport iterate_rate_check(const IterationTrace &trace, const RateEstimate &rate,
                                     const DerivedConstants &constants,
                                     std::optional<double> c_l) {
  if (trace.outcome != RunOutcome::Converged)
    throw NotConvergedError("iterate_rate_check: run did not converge");
  if (trace.iterates.size() != trace.records.size() || trace.iterates.empty())
    throw InvalidArgumentError("iterate_rate_check: trace was recorded without iterates");
  if (!rate.theta_hat)
    throw InvalidArgumentError("iterate_rate_check: rate estimate carries no exponent");
  if (!(constants.min_c234() > 0.0))
    throw InvalidArgumentError("iterate_rate_check: c11/c12 need min{c2,c3,c4} > 0");

  const double theta = std::max(*rate.theta_hat, 1e-6);
  const std::size_t n_records = trace.records.size();

  // psi_* proxy: the final record (the limit up to the stopping tolerance).
  const double psi_star = trace.records.back().psi;
  std::vector<double> gaps(n_records);
  for (std::size_t i = 0; i < n_records; ++i) gaps[i] = trace.records[i].psi - psi_star;

  double used_c_l = c_l ? *c_l
                        : estimate_loja_constant(trace.records, gaps, theta,
                                                 rate.window_begin, rate.window_end);
  if (!(used_c_l > 0.0))
    throw InvalidArgumentError("iterate_rate_check: no usable Lojasiewicz constant");

  const SolverState &fin = trace.iterates.back();

  IterateRateReport out;
  out.theta_used = theta;
  out.c_l_used = used_c_l;
  out.worst_slack_xyu = -kInf;
  out.worst_slack_z = -kInf;

  const std::size_t begin = std::max<std::size_t>(rate.window_begin, 1);
  for (std::size_t i = begin; i < n_records; ++i) {
    const double e = std::max(gaps[i], 0.0);
    const double phi = used_c_l / (1.0 - theta) * std::pow(e, 1.0 - theta);
    const double envelope = std::max(std::sqrt(e), phi);
    const double bound_xyu = constants.c11 * envelope;
    const double bound_z = constants.c12 * envelope;

    const SolverState &s = trace.iterates[i];
    const double dx = dist(s.x, fin.x);
    const double dy = dist(s.y, fin.y);
    const double du = dist(s.u, fin.u);
    const double dz = dist(s.z, fin.z);

    out.worst_slack_xyu =
        std::max(out.worst_slack_xyu, std::max(std::max(dx, dy), du) - bound_xyu);
    out.worst_slack_z = std::max(out.worst_slack_z, dz - bound_z);
  }
  out.ok = out.worst_slack_xyu <= 1e-9 && out.worst_slack_z <= 1e-9;
  return out;
}

namespace {

DiagnosticsReport diagnose_impl(std::span<const IterationRecord> records,
                                const DerivedConstants &constants,
                                const DiagnosticsOptions &options,
                                const IterationTrace *trace) {
  if (records.size() < 2)
    throw TooShortError("diagnose: need at least 2 trace records");

  DiagnosticsReport report;
  report.descent = check_descent(records, constants);
  report.subgrad = check_subgradient_bound(records, constants);

  report.bounded = true;
  for (const auto &r : records) {
    if (!std::isfinite(r.psi) || !std::isfinite(r.objective)) report.bounded = false;
    report.max_step_norm = std::max(
        report.max_step_norm, std::max(std::max(r.dx, r.dy), std::max(r.dz, r.du)));
  }

  if (constants.psi_lower_bound_hint) {
    const double hint = *constants.psi_lower_bound_hint;
    double min_psi = kInf;
    for (const auto &r : records) min_psi = std::min(min_psi, r.psi);
    report.psi_lower_ok = min_psi >= hint - 1e-9 * (1.0 + std::abs(hint));
  }

  double psi_star;
  if (options.psi_star) {
    psi_star = *options.psi_star;
  } else {
    const std::size_t tail = std::max<std::size_t>(1, records.size() / 20);
    double s = 0.0;
    for (std::size_t i = records.size() - tail; i < records.size(); ++i) s += records[i].psi;
    psi_star = s / static_cast<double>(tail);
  }
  report.psi_star_used = psi_star;

  std::vector<double> gaps(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) gaps[i] = records[i].psi - psi_star;

  try {
    report.rate = estimate_rate(gaps);
  } catch (const TooShortError &) {
    report.rate = RateEstimate{};
  }

  if (report.rate.theta_hat && report.rate.regime != RateRegime::FiniteTime) {
    const double theta = *report.rate.theta_hat;
    double c_l = options.loja_constant.value_or(0.0);
    if (!(c_l > 0.0))
      c_l = estimate_loja_constant(records, gaps, theta, report.rate.window_begin,
                                   report.rate.window_end);
    report.estimated_loja_constant = c_l;
    if (c_l > 0.0 && constants.min_c234() > 0.0) {
      const DerivedConstants with_cl = constants.with_lojasiewicz(c_l);
      report.recurrence_reference_c10 = with_cl.c10;
      std::vector<double> window_gaps(gaps.begin() + static_cast<long>(report.rate.window_begin),
                                      gaps.begin() + static_cast<long>(report.rate.window_end));
      if (window_gaps.size() >= 2) {
        const RecurrenceCheck rc = check_recurrence(window_gaps, theta, *with_cl.c10);
        report.recurrence_ok = rc.ok;
        report.recurrence_empirical_c10 = rc.empirical_c10;
      }
    }
  }

  if (trace) {
    report.outcome = trace->outcome;
    report.limit_point = trace->final_state;
    const KktResidual kkt = {.grad_x = records.back().kkt_grad_x,
                             .y = records.back().kkt_y,
                             .z = records.back().kkt_z,
                             .feasibility = records.back().kkt_feas};
    report.final_kkt = kkt;
    if (options.run_iterate_check && trace->outcome == RunOutcome::Converged &&
        trace->iterates.size() == trace->records.size() && report.rate.theta_hat &&
        constants.min_c234() > 0.0) {
      try {
        report.iterate_rate =
            iterate_rate_check(*trace, report.rate, constants, options.loja_constant);
      } catch (const Error &) {
        // informational check; left unset when the inputs cannot drive it
      }
    }
  } else {
    report.final_kkt = {.grad_x = records.back().kkt_grad_x,
                        .y = records.back().kkt_y,
                        .z = records.back().kkt_z,
                        .feasibility = records.back().kkt_feas};
  }
  return report;
}

} // namespace

DiagnosticsReport diagnose(const IterationTrace &trace, const DiagnosticsOptions &options) {
  return diagnose_impl(trace.records, trace.constants, options, &trace);
}

DiagnosticsReport diagnose_records(std::span<const IterationRecord> records,
                                   const DerivedConstants &constants,
                                   const DiagnosticsOptions &options) {
  return diagnose_impl(records, constants, options, nullptr);
}

std::string summarize(const DiagnosticsReport &report) {
  std::ostringstream os;
  os << "descent inequality: " << (report.descent.ok ? "ok" : "VIOLATED")
     << " (worst violation " << report.descent.worst_violation << ")\n";
  os << "subgradient bound:  " << (report.subgrad.ok ? "ok" : "VIOLATED")
     << " (worst slack " << report.subgrad.worst_slack << ")\n";
  if (report.psi_lower_ok)
    os << "psi lower bound:    " << (*report.psi_lower_ok ? "ok" : "VIOLATED") << "\n";
  os << "rate regime:        ";
  switch (report.rate.regime) {
  case RateRegime::FiniteTime:
    os << "finite time";
    break;
  case RateRegime::Linear:
    os << "linear, Q ~= " << report.rate.q_hat.value_or(0.0)
       << " (consistent with theta <= 1/2)";
    break;
  case RateRegime::Sublinear:
    os << "sublinear, theta ~= " << report.rate.theta_hat.value_or(0.0);
    break;
  case RateRegime::Undetermined:
    os << "undetermined";
    break;
  }
  os << " [fit " << report.rate.fit_quality << "]\n";
  if (report.recurrence_empirical_c10)
    os << "gap recurrence:     empirical constant " << *report.recurrence_empirical_c10
       << "\n";
  if (report.iterate_rate)
    os << "iterate bounds:     " << (report.iterate_rate->ok ? "ok" : "VIOLATED") << "\n";
  os << "final KKT residuals: grad_x " << report.final_kkt.grad_x << ", y "
     << report.final_kkt.y << ", z " << report.final_kkt.z << ", feas "
     << report.final_kkt.feasibility << "\n";
  return os.str();
}

} // namespace trisplit
