#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "solver.hpp"

using namespace trisplit;

namespace {

// min |x| + 0.5 (x - 1)^2 over the reals; the minimizer is 0.
ProblemInstance one_dim_l1() {
  ProblemInstance pb;
  pb.name = "one_dim_l1";
  pb.f = ProxFunction::l1(1.0);
  pb.g = ProxFunction::zero();
  pb.h = SmoothCoupling::separable(1.0, Vec{1.0}, 0.0, Vec{0.0});
  pb.a = DenseOperator::identity(1);
  pb.inf_h = 0.0;
  return pb;
}

ProblemInstance all_zero(std::size_t m) {
  ProblemInstance pb;
  pb.name = "all_zero";
  pb.f = ProxFunction::zero();
  pb.g = ProxFunction::zero();
  pb.h = SmoothCoupling::separable(0.0, Vec(m, 0.0), 0.0, Vec(m, 0.0));
  pb.a = DenseOperator::identity(m);
  pb.inf_h = 0.0;
  return pb;
}

SolverParams tuned(const ProblemInstance &pb, double safety = 0.5) {
  return select_parameters(pb.a.spectral(), pb.h.lipschitz(), safety);
}

} // namespace

TEST_CASE("vanishing oracles give a fixed point") {
  const ProblemInstance pb = all_zero(2);
  SolverParams p{.mu = 2.0, .beta = 3.0, .tau = 4.0, .sigma = 0.5};

  SolverState s;
  s.x = {1.0, -2.0};
  s.y = {0.5, 0.25};
  s.z = {1.0, -2.0}; // = A x with u = 0
  s.u = {0.0, 0.0};
  s.x_prev = s.x;
  s.y_prev = s.y;
  s.z_prev = s.z;
  s.u_prev = s.u;

  const SolverState next = step(s, pb, p);
  CHECK(next.y == s.y);
  CHECK(next.z == s.x);
  CHECK(next.x == s.x);
  CHECK(next.u == Vec{0.0, 0.0});
  CHECK(next.iteration == 1);
}

TEST_CASE("zero F makes the z-update explicit") {
  ProblemInstance pb = all_zero(2);
  pb.h = SmoothCoupling::separable(1.0, Vec{0.3, -0.7}, 0.0, Vec(2, 0.0));
  SolverParams p{.mu = 2.0, .beta = 4.0, .tau = 8.0, .sigma = 0.5};

  SolverState s = make_initial_state(pb, Vec{1.0, 2.0});
  s.u = {0.5, -1.5};

  const SolverState next = step(s, pb, p);
  const Vec ax = pb.a.apply(s.x);
  for (std::size_t i = 0; i < 2; ++i) CHECK(next.z[i] == ax[i] + s.u[i] / p.beta);
}

TEST_CASE("one-dimensional l1 instance converges to the grid-certified minimizer") {
  const ProblemInstance pb = one_dim_l1();

  // independent ground truth: the objective has its minimum at 0 with value 0.5
  const double x_star = oracles::grid_argmin_1d(
      [](double x) { return std::abs(x) + 0.5 * (x - 1.0) * (x - 1.0); }, -2.0, 2.0, 1e-5);
  CHECK(std::abs(x_star) <= 1e-5);

  StoppingRule stop;
  stop.max_iterations = 5000;
  stop.step_tol = 1e-12;
  const IterationTrace trace = run(pb, tuned(pb), stop, make_initial_state(pb));
  CHECK(trace.outcome == RunOutcome::Converged);
  CHECK(std::abs(trace.final_state.x[0]) <= 1e-6);
  // subgradient certificate at the limit: 1 in [-1, 1]
  CHECK(std::abs(trace.final_state.u[0] - 1.0) <= 1e-6);
}

TEST_CASE("augmented Lagrangian") {
  SUBCASE("feasible states reduce to the objective") {
    ProblemInstance pb = all_zero(2);
    pb.f = ProxFunction::l1(2.0);
    pb.g = ProxFunction::squared_l2(1.0);
    pb.h = SmoothCoupling::separable(1.0, Vec{0.0, 0.0}, 1.0, Vec{1.0, 1.0});
    SolverParams p{.mu = 1.0, .beta = 7.0, .tau = 1.0, .sigma = 0.5};

    SolverState s = make_initial_state(pb, Vec{1.0, -2.0}, Vec{0.5, 0.5});
    s.u = {3.0, -4.0}; // arbitrary dual, Ax = z
    const double expected = pb.f.evaluate(s.z) + pb.g.evaluate(s.y) + pb.h.value(s.x, s.y);
    CHECK(augmented_lagrangian(s, pb, p) == doctest::Approx(expected).epsilon(1e-15));
  }

  SUBCASE("hand evaluation") {
    const ProblemInstance pb = all_zero(1);
    SolverParams p{.mu = 1.0, .beta = 2.0, .tau = 1.0, .sigma = 1.0};
    SolverState s;
    s.x = {1.0};
    s.y = {0.0};
    s.z = {0.0};
    s.u = {2.0};
    CHECK(augmented_lagrangian(s, pb, p) == 3.0); // <2, 1> + (2/2) * 1
  }

  SUBCASE("all-zero state with zero functions") {
    const ProblemInstance pb = all_zero(2);
    SolverParams p{.mu = 1.0, .beta = 2.0, .tau = 1.0, .sigma = 1.0};
    const SolverState s = make_initial_state(pb);
    CHECK(augmented_lagrangian(s, pb, p) == 0.0);
  }
}

TEST_CASE("regularized function evaluation") {
  ProblemInstance pb = all_zero(2);
  pb.f = ProxFunction::l1(0.5);
  pb.h = SmoothCoupling::separable(1.0, Vec{1.0, 0.0}, 0.0, Vec(2, 0.0));
  SolverParams p{.mu = 3.0, .beta = 2.5, .tau = 9.0, .sigma = 0.25};
  const DerivedConstants c = derive_constants(pb.a.spectral(), pb.h.lipschitz(), p);

  SolverState s;
  s.x = {0.4, -0.3};
  s.y = {0.1, 0.2};
  s.z = {0.5, -0.2};
  s.u = {1.0, -1.0};
  s.x_prev = {0.1, 0.1};
  s.y_prev = s.y;
  s.z_prev = s.z;
  s.u_prev = {0.8, -0.6};
  s.iteration = 3;

  SUBCASE("matches the independent evaluator") {
    const double got = evaluate_psi(s, pb, p, c);
    const double want = oracles::psi_reference(s, pb, p, c.c0, c.c1);
    CHECK(got == doctest::Approx(want).epsilon(1e-13));
  }

  SUBCASE("no displacement reduces to the Lagrangian") {
    SolverState t = s;
    t.x_prev = t.x;
    t.u_prev = t.u;
    CHECK(evaluate_psi(t, pb, p, c) ==
          doctest::Approx(augmented_lagrangian(t, pb, p)).epsilon(1e-15));
  }

  SUBCASE("sigma = 1 drops the coupled regularizer") {
    SolverParams p1 = p;
    p1.sigma = 1.0;
    const DerivedConstants c1 = derive_constants(pb.a.spectral(), pb.h.lipschitz(), p1);
    CHECK(c1.c0 == 0.0);
    const double dx2 = norm_sq(sub(s.x, s.x_prev));
    CHECK(evaluate_psi(s, pb, p1, c1) ==
          doctest::Approx(augmented_lagrangian(s, pb, p1) + c1.c1 * dx2).epsilon(1e-13));
  }

  SUBCASE("needs previous fields") {
    SolverState t = s;
    t.iteration = 0;
    CHECK_THROWS_AS((void)evaluate_psi(t, pb, p, c), InvalidArgumentError);
  }
}

TEST_CASE("subgradient element") {
  SUBCASE("vanishes at a stationary repeat") {
    // stationary: consecutive iterates equal, Ax = z, grad_x H + A^T u = 0
    ProblemInstance pb = all_zero(1);
    pb.h = SmoothCoupling::separable(1.0, Vec{1.0}, 0.0, Vec{0.0});
    SolverParams p{.mu = 2.0, .beta = 2.0, .tau = 4.0, .sigma = 0.5};
    const DerivedConstants c = derive_constants(pb.a.spectral(), pb.h.lipschitz(), p);

    SolverState s;
    s.x = {0.0};
    s.y = {0.0};
    s.z = {0.0};
    s.u = {1.0}; // grad_x H(0) = -1, A^T u = 1
    s.x_prev = s.x;
    s.y_prev = s.y;
    s.z_prev = s.z;
    s.u_prev = s.u;
    s.iteration = 2;

    const SubgradientEstimate d = subgradient_residual(s, pb, p, c);
    CHECK(d.norm == 0.0);
  }

  SUBCASE("hand-evaluated z component") {
    const ProblemInstance pb = all_zero(2);
    SolverParams p{.mu = 1.0, .beta = 2.0, .tau = 1.0, .sigma = 1.0};
    const DerivedConstants c = derive_constants(pb.a.spectral(), 0.0, p);

    SolverState s;
    s.x = {0.0, 0.0};
    s.x_prev = {1.0, 0.0}; // x_{n-1} - x_n = (1, 0)
    s.y = s.y_prev = {0.0, 0.0};
    s.z = s.z_prev = {0.0, 0.0};
    s.u = s.u_prev = {0.0, 0.0};
    s.iteration = 1;

    const SubgradientEstimate d = subgradient_residual(s, pb, p, c);
    CHECK(d.d_z == Vec{2.0, 0.0});
  }

  SUBCASE("product norm inequality") {
    ProblemInstance pb = all_zero(2);
    pb.h = SmoothCoupling::separable(1.0, Vec{0.5, 0.5}, 1.0, Vec{0.0, 1.0});
    const SolverParams p = tuned(pb);
    const DerivedConstants c = derive_constants(pb.a.spectral(), pb.h.lipschitz(), p);

    SolverState s = make_initial_state(pb, Vec{1.0, 2.0}, Vec{-1.0, 0.5});
    s = step(s, pb, p);
    const SubgradientEstimate d = subgradient_residual(s, pb, p, c);
    const double comp_sum = norm(d.d_x) + norm(d.d_y) + norm(d.d_z) + norm(d.d_u) +
                            norm(d.d_x_prev) + norm(d.d_u_prev);
    CHECK(d.norm <= comp_sum * (1.0 + 1e-12));
    CHECK(d.norm >= comp_sum / std::sqrt(6.0) * (1.0 - 1e-12));
  }
}

TEST_CASE("KKT residuals") {
  SUBCASE("exact KKT point of the convex sanity instance") {
    const ProblemInstance pb = make_convex_sanity(1);
    SolverState s;
    s.x = *pb.solution_x; // 0.5
    s.y = *pb.solution_y; // 0.25
    s.z = pb.a.apply(s.x);
    s.u = {1.0}; // -grad_x H(x*) = -(0.5 - 1.5)
    const KktResidual r = kkt_residual(s, pb);
    CHECK(r.grad_x <= 1e-12);
    CHECK(r.y <= 1e-12);
    CHECK(r.z <= 1e-12);
    CHECK(r.feasibility <= 1e-12);
  }

  SUBCASE("one-dimensional instance at its minimizer") {
    const ProblemInstance pb = one_dim_l1();
    SolverState s;
    s.x = {0.0};
    s.y = {0.0};
    s.z = {0.0};
    s.u = {1.0};
    const KktResidual r = kkt_residual(s, pb);
    CHECK(r.grad_x == 0.0); // grad H(0) + u = -1 + 1
    CHECK(r.z == 0.0);      // soft-threshold(0 + 1) at level 1 is 0
  }

  SUBCASE("feasibility equals the scaled dual step after any step") {
    ProblemInstance pb = all_zero(2);
    pb.f = ProxFunction::l1(0.3);
    pb.h = SmoothCoupling::separable(1.0, Vec{1.0, -1.0}, 0.0, Vec(2, 0.0));
    const SolverParams p = tuned(pb);

    SolverState s = make_initial_state(pb, Vec{2.0, -1.0});
    for (int i = 0; i < 25; ++i) {
      s = step(s, pb, p);
      const KktResidual r = kkt_residual(s, pb);
      const double expected = dist(s.u, s.u_prev) / (p.sigma * p.beta);
      CHECK(r.feasibility == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("run") {
  const ProblemInstance pb = make_convex_sanity(2);
  const SolverParams p = tuned(pb);

  SUBCASE("a single step gives a single record") {
    StoppingRule stop;
    stop.max_iterations = 1;
    stop.step_tol = 0.0;
    const IterationTrace trace = run(pb, p, stop, make_initial_state(pb));
    CHECK(trace.records.size() == 1);
    CHECK(trace.records[0].n == 1);
    CHECK(trace.outcome == RunOutcome::MaxIterations);
  }

  SUBCASE("strict mode refuses a broken tau") {
    SolverParams broken = p;
    broken.tau = 100.0 * p.tau; // c2 turns negative
    const DerivedConstants c = derive_constants(pb.a.spectral(), pb.h.lipschitz(), broken);
    REQUIRE(c.c2 < 0.0);
    StoppingRule stop;
    CHECK_THROWS_AS((void)run(pb, broken, stop, make_initial_state(pb)),
                    AssumptionViolationError);
    // permissive mode runs anyway
    RunOptions opt;
    opt.strict_mode = false;
    stop.max_iterations = 10;
    const IterationTrace trace = run(pb, broken, stop, make_initial_state(pb), opt);
    CHECK(trace.records.size() >= 1);
  }

  SUBCASE("trace invariants along a converged run") {
    StoppingRule stop;
    stop.max_iterations = 5000;
    stop.step_tol = 1e-9;
    const IterationTrace trace = run(pb, p, stop, make_initial_state(pb));
    REQUIRE(trace.outcome == RunOutcome::Converged);
    const DerivedConstants &c = trace.constants;

    double prev_psi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      const IterationRecord &r = trace.records[i];
      // feasibility identity
      CHECK(r.feasibility ==
            doctest::Approx(r.du / (p.sigma * p.beta)).epsilon(1e-11));
      // monotone psi within tolerance
      CHECK(r.psi <= prev_psi + 1e-9 * (1.0 + std::abs(prev_psi)));
      prev_psi = r.psi;
      // subgradient bound
      CHECK(r.subgrad_norm <= c.c5 * r.dx + c.c6 * r.dy + c.c7 * r.du + 1e-9);
      // z-step inequality needs the previous du
      if (i > 0) {
        const IterationRecord &q = trace.records[i - 1];
        CHECK(r.dz <= pb.a.norm() * r.dx + (r.du + q.du) / (p.sigma * p.beta) + 1e-12);
      }
    }
    // psi bounded below by the declared hint
    REQUIRE(trace.constants.psi_lower_bound_hint.has_value());
    for (const IterationRecord &r : trace.records)
      CHECK(r.psi >= *trace.constants.psi_lower_bound_hint - 1e-9);
    // vanishing differences at the end
    const IterationRecord &last = trace.records.back();
    CHECK(std::max(std::max(last.dx, last.dy), std::max(last.dz, last.du)) < 1e-9);
  }

  SUBCASE("dual update identity to rounding") {
    StoppingRule stop;
    stop.max_iterations = 200;
    stop.step_tol = 0.0;
    const IterationTrace trace = run(pb, p, stop, make_initial_state(pb));
    REQUIRE(trace.iterates.size() == trace.records.size());
    for (const SolverState &s : trace.iterates) {
      const Vec ax = pb.a.apply(s.x);
      for (std::size_t i = 0; i < s.u.size(); ++i) {
        const double rhs = p.sigma * p.beta * (ax[i] - s.z[i]);
        const double lhs = s.u[i] - s.u_prev[i];
        const double scale =
            std::max({std::abs(s.u[i]), std::abs(s.u_prev[i]), std::abs(rhs), 1e-300});
        const double ulp = std::nextafter(scale, std::numeric_limits<double>::infinity()) -
                           scale;
        CHECK(std::abs(lhs - rhs) <= 4.0 * ulp);
      }
    }
  }

  SUBCASE("reference run regression fixture") {
    StoppingRule stop;
    stop.max_iterations = 5000;
    stop.step_tol = 1e-8;
    const IterationTrace trace = run(pb, p, stop, make_initial_state(pb));
    CHECK(trace.outcome == RunOutcome::Converged);
    // frozen by the reference run on this platform
    CHECK(trace.records.size() == 3202);
  }

  SUBCASE("identical configurations give identical traces") {
    StoppingRule stop;
    stop.max_iterations = 300;
    stop.step_tol = 1e-9;
    const IterationTrace a = run(pb, p, stop, make_initial_state(pb));
    const IterationTrace b = run(pb, p, stop, make_initial_state(pb));
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].psi == b.records[i].psi);
      CHECK(a.records[i].subgrad_norm == b.records[i].subgrad_norm);
    }
  }

  SUBCASE("combined update identity ties the x and u blocks together") {
    // Substituting the u-update into the x-update gives
    //   A^T u_{n+1} = (1 - 1/sigma) A^T (u_{n+1} - u_n)
    //                 + B (x_n - x_{n+1}) - grad_x H(x_n, y_{n+1})
    // which must hold for every step of every run.
    const ProblemInstance inst = make_tv_sparse_recovery(6, 2);
    const SolverParams q = tuned(inst);
    StoppingRule stop;
    stop.max_iterations = 50;
    stop.step_tol = 0.0;
    const IterationTrace trace = run(inst, q, stop, make_initial_state(inst));
    for (const SolverState &s : trace.iterates) {
      const Vec lhs = inst.a.adjoint_apply(s.u);
      const Vec du = sub(s.u, s.u_prev);
      Vec rhs = inst.a.adjoint_apply(du);
      for (double &v : rhs) v *= 1.0 - 1.0 / q.sigma;
      const Vec back = sub(s.x_prev, s.x);
      axpy(rhs, 1.0, inst.a.coupling_apply(q.tau, q.beta, back));
      axpy(rhs, -1.0, inst.h.grad_x(s.x_prev, s.y));
      double scale = 1.0;
      for (double v : lhs) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < lhs.size(); ++i)
        CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-9 * scale);
    }
  }

  SUBCASE("divergence guard stops escaping runs") {
    ProblemInstance esc = all_zero(1);
    esc.h = SmoothCoupling::separable(1.0, Vec{0.0}, 0.0, Vec{0.0});
    // gradient step far beyond 2/L on the x block diverges
    SolverParams bad{.mu = 1.0, .beta = 1e-6, .tau = 1e-9, .sigma = 1.0};
    StoppingRule stop;
    stop.max_iterations = 10000;
    stop.divergence_guard = 1e6;
    RunOptions opt;
    opt.strict_mode = false;
    const IterationTrace trace = run(esc, bad, stop, make_initial_state(esc, Vec{1.0}), opt);
    CHECK(trace.outcome == RunOutcome::Divergence);
    CHECK_FALSE(trace.message.empty());
  }
}

TEST_CASE("an under-declared Lipschitz constant trips the per-step descent guard") {
  // declared constants only validate by sampling; when the declaration is
  // false the computed margins are wrong and strict mode halts the run
  ProblemInstance pb;
  pb.name = "under_declared";
  pb.f = ProxFunction::l1(0.2);
  pb.g = ProxFunction::zero();
  pb.h = SmoothCoupling::custom(
      1, 1, [](auto x, auto y) { return 25.0 * (x[0] - 1.0) * (x[0] - 1.0) + 0.0 * y[0]; },
      [](auto x, auto) { return Vec{50.0 * (x[0] - 1.0)}; },
      [](auto, auto) { return Vec{0.0}; }, 0.5);
  pb.a = DenseOperator::identity(1);

  const SolverParams p = select_parameters(pb.a.spectral(), pb.h.lipschitz(), 0.5);
  StoppingRule stop;
  stop.max_iterations = 500;
  stop.step_tol = 0.0;
  const IterationTrace strict = run(pb, p, stop, make_initial_state(pb));
  CHECK(strict.outcome == RunOutcome::AssumptionViolation);
  CHECK(strict.message.find("descent") != std::string::npos);
  CHECK(strict.records.size() < 500);

  // permissive mode records the violating trace instead
  RunOptions opt;
  opt.strict_mode = false;
  const IterationTrace loose = run(pb, p, stop, make_initial_state(pb), opt);
  CHECK(loose.records.size() == 500);
  CHECK_FALSE(check_descent(loose.records, loose.constants).ok);
}

TEST_CASE("nonconvex instance converges to a KKT point") {
  // hard-thresholded block + TV composition: only stationarity is promised,
  // and the certificates confirm exactly that at the limit
  const ProblemInstance pb = make_tv_sparse_recovery(5, 4);
  const SolverParams p = tuned(pb);
  StoppingRule stop;
  stop.max_iterations = 100000;
  stop.step_tol = 1e-10;
  const IterationTrace trace = run(pb, p, stop, make_initial_state(pb));
  REQUIRE(trace.outcome == RunOutcome::Converged);
  const KktResidual kkt = kkt_residual(trace.final_state, pb);
  CHECK(kkt.max() <= 1e-6);

  const DiagnosticsReport report = diagnose(trace);
  CHECK(report.descent.ok);
  CHECK(report.subgrad.ok);
  REQUIRE(report.iterate_rate.has_value());
  CHECK(report.iterate_rate->ok);
}

TEST_CASE("initial state defaults") {
  const ProblemInstance pb = make_tv_sparse_recovery(6, 3);
  const SolverState s = make_initial_state(pb);
  CHECK(s.z == pb.a.apply(s.x)); // first feasibility residual is 0
  CHECK(s.u == Vec(pb.p(), 0.0));
  CHECK(s.iteration == 0);
}
