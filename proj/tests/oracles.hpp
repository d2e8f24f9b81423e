#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check: grid minimizers, finite differences, a second evaluator
// for the regularized function, and the standalone iterations the reduction
// instances must reproduce.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "bench.hpp"
#include "functions.hpp"
#include "solver.hpp"

namespace oracles {

using trisplit::Vec;

inline double u01(std::mt19937_64 &gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64 &gen, double lo, double hi) {
  return lo + (hi - lo) * u01(gen);
}

inline Vec random_vec(std::mt19937_64 &gen, std::size_t n, double lo, double hi) {
  Vec v(n);
  for (double &x : v) x = uniform(gen, lo, hi);
  return v;
}

inline Vec random_unit(std::mt19937_64 &gen, std::size_t n) {
  Vec v(n);
  double s = 0.0;
  for (double &x : v) {
    x = uniform(gen, -1.0, 1.0);
    s += x * x;
  }
  s = std::sqrt(s);
  if (s == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (double &x : v) x /= s;
  return v;
}

/// argmin of a scalar function over the grid {lo, lo+step, ..., hi}.
inline double grid_argmin_1d(const std::function<double(double)> &fn, double lo, double hi,
                             double step) {
  double best_x = lo;
  double best_v = fn(lo);
  for (double x = lo; x <= hi + 0.5 * step; x += step) {
    const double v = fn(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return best_x;
}

/// psi(w) + (1/2 gamma) ||v - w||^2, the objective the prox must minimize.
inline double prox_objective(const trisplit::ProxFunction &f, double gamma, const Vec &v,
                             const Vec &w) {
  double s = f.evaluate(w);
  for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - w[i]) * (v[i] - w[i]) / (2.0 * gamma);
  return s;
}

/// Central finite differences for the coupling gradients.
inline Vec fd_grad_x(const trisplit::SmoothCoupling &h, Vec x, const Vec &y,
                     double step = 1e-5) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + step;
    const double hi = h.value(x, y);
    x[i] = xi - step;
    const double lo = h.value(x, y);
    x[i] = xi;
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

inline Vec fd_grad_y(const trisplit::SmoothCoupling &h, const Vec &x, Vec y,
                     double step = 1e-5) {
  Vec g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double yi = y[i];
    y[i] = yi + step;
    const double hi = h.value(x, y);
    y[i] = yi - step;
    const double lo = h.value(x, y);
    y[i] = yi;
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

/// Second implementation of the regularized augmented Lagrangian, written
/// against explicit dense matrices instead of the operator interface.
inline double psi_reference(const trisplit::SolverState &s,
                            const trisplit::ProblemInstance &pb,
                            const trisplit::SolverParams &p, double c0, double c1) {
  const std::size_t m = pb.m();
  const std::size_t rows = pb.p();

  // L_beta from scratch
  Vec ax(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < m; ++j) ax[i] += pb.a.entry(i, j) * s.x[j];
  double lag = pb.f.evaluate(s.z) + pb.g.evaluate(s.y) + pb.h.value(s.x, s.y);
  for (std::size_t i = 0; i < rows; ++i) {
    const double r = ax[i] - s.z[i];
    lag += s.u[i] * r + 0.5 * p.beta * r * r;
  }

  // B = tau I - beta A^T A as an explicit matrix
  std::vector<double> b_mat(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double aa = 0.0;
      for (std::size_t k = 0; k < rows; ++k) aa += pb.a.entry(k, i) * pb.a.entry(k, j);
      b_mat[i * m + j] = (i == j ? p.tau : 0.0) - p.beta * aa;
    }

  Vec reg(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double at_du = 0.0;
    for (std::size_t k = 0; k < rows; ++k)
      at_du += pb.a.entry(k, j) * (s.u[k] - s.u_prev[k]);
    double b_dx = 0.0;
    for (std::size_t i = 0; i < m; ++i) b_dx += b_mat[j * m + i] * (s.x[i] - s.x_prev[i]);
    reg[j] = at_du + p.sigma * b_dx;
  }

  double out = lag;
  for (double r : reg) out += c0 * r * r;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = s.x[i] - s.x_prev[i];
    out += c1 * d * d;
  }
  return out;
}

/// Standalone proximal-gradient iteration y+ = prox_{G/mu}(y - grad h(y)/mu).
inline std::vector<Vec> prox_grad_reference(const trisplit::ProxFunction &g,
                                            const std::function<Vec(const Vec &)> &grad_h,
                                            Vec y0, double mu, std::size_t steps) {
  std::vector<Vec> out;
  Vec y = std::move(y0);
  for (std::size_t s = 0; s < steps; ++s) {
    const Vec gh = grad_h(y);
    Vec arg(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) arg[i] = y[i] - gh[i] / mu;
    y = g.prox(1.0 / mu, arg);
    out.push_back(y);
  }
  return out;
}

/// The three-step scheme the y-free reduction must reproduce:
///   z+ = prox_{F/beta}(A x + u/beta)
///   x+ = x - (grad h(x) + A^T u + beta A^T (A x - z+)) / tau
///   u+ = u + sigma beta (A x+ - z+)
struct ThreeStepState {
  Vec x, z, u;
};

inline ThreeStepState three_step_reference(const trisplit::ProblemInstance &pb,
                                           const trisplit::SolverParams &p,
                                           const std::function<Vec(const Vec &)> &grad_h,
                                           const ThreeStepState &s) {
  ThreeStepState next;
  const Vec ax = pb.a.apply(s.x);
  Vec z_arg(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) z_arg[i] = ax[i] + s.u[i] / p.beta;
  next.z = pb.f.prox(1.0 / p.beta, z_arg);

  const Vec gx = grad_h(s.x);
  Vec resid(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) resid[i] = ax[i] - next.z[i];
  const Vec at_u = pb.a.adjoint_apply(s.u);
  const Vec at_r = pb.a.adjoint_apply(resid);
  next.x.resize(s.x.size());
  for (std::size_t i = 0; i < s.x.size(); ++i)
    next.x[i] = s.x[i] - (gx[i] + at_u[i] + p.beta * at_r[i]) / p.tau;

  const Vec ax_new = pb.a.apply(next.x);
  next.u.resize(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i)
    next.u[i] = s.u[i] + p.sigma * p.beta * (ax_new[i] - next.z[i]);
  return next;
}

} // namespace oracles
